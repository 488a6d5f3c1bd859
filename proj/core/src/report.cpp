#include "qe/report.hpp"

#include <iomanip>
#include <ostream>

namespace qe {

const char* check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Zero: return "Zero";
    case CheckStatus::ProbablyZero: return "ProbablyZero";
    case CheckStatus::NonZero: return "NonZero";
    case CheckStatus::Refused: return "Refused";
    case CheckStatus::Error: return "Error";
  }
  return "?";
}

CheckStatus from_zero_status(ZeroStatus s) {
  switch (s) {
    case ZeroStatus::Zero: return CheckStatus::Zero;
    case ZeroStatus::ProbablyZero: return CheckStatus::ProbablyZero;
    case ZeroStatus::NonZero:
    case ZeroStatus::ProbablyNonZero: return CheckStatus::NonZero;
  }
  return CheckStatus::Error;
}

void VerificationReport::add(const std::string& id, const std::string& anchor,
                             const TensorZeroResult& r, double wall_ms) {
  CheckRecord rec;
  rec.id = id;
  rec.anchor = anchor;
  rec.status = from_zero_status(r.status);
  rec.max_abs = r.max_abs;
  rec.exact = r.exact;
  rec.wall_ms = wall_ms;
  checks.push_back(std::move(rec));
}

bool VerificationReport::all_passed() const {
  for (const auto& c : checks) {
    if (c.status == CheckStatus::Error) return false;
    if (!c.passed()) return false;
  }
  return true;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

nlohmann::json report_to_json(const VerificationReport& rep) {
  nlohmann::json j;
  j["report_version"] = kReportVersion;
  j["tool_version"] = rep.tool_version;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(rep.input_hash));
  j["input_hash"] = hash;
  j["seed"] = rep.seed;
  j["all_passed"] = rep.all_passed();
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks) {
    nlohmann::json cj;
    cj["id"] = c.id;
    cj["anchor"] = c.anchor;
    cj["status"] = check_status_name(c.status);
    if (c.exact) {
      cj["residual"] = "exact";
    } else {
      cj["residual"] = c.max_abs;
    }
    cj["expected_pass"] = c.expected_pass;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  return j;
}

void print_report(std::ostream& os, const VerificationReport& rep) {
  for (const auto& c : rep.checks) {
    os << (c.passed() ? "PASS " : "FAIL ") << std::left << std::setw(40) << c.id
       << ' ' << std::setw(14) << check_status_name(c.status);
    if (c.exact) {
      os << " residual=exact";
    } else {
      os << " residual=" << std::scientific << std::setprecision(3) << c.max_abs
         << std::defaultfloat;
    }
    if (!c.expected_pass) os << " (negative control)";
    os << "  [" << std::fixed << std::setprecision(1) << c.wall_ms
       << " ms]" << std::defaultfloat;
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
  }
  os << (rep.all_passed() ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT")
     << " (" << rep.checks.size() << " checks, seed " << rep.seed << ")\n";
}

}  // namespace qe
