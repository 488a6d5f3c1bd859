#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qe/zerotest.hpp"
#include "qe/tensor.hpp"

#include <nlohmann/json.hpp>

namespace qe {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportVersion = 1;

enum class CheckStatus { Zero, ProbablyZero, NonZero, Refused, Error };
const char* check_status_name(CheckStatus s);

/// ProbablyNonZero collapses to NonZero at the reporting surface.
CheckStatus from_zero_status(ZeroStatus s);

struct CheckRecord {
  std::string id;
  std::string anchor;  // which identity/claim this verifies
  CheckStatus status = CheckStatus::Error;
  double max_abs = 0.0;
  bool exact = false;
  bool expected_pass = true;  // negative controls set this false
  double wall_ms = 0.0;
  std::string detail;

  bool passed() const {
    bool ok = status == CheckStatus::Zero || status == CheckStatus::ProbablyZero;
    return expected_pass ? ok : !ok;
  }
};

struct VerificationReport {
  std::string tool_version = kToolVersion;
  std::uint64_t input_hash = 0;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> checks;

  void add(CheckRecord r) { checks.push_back(std::move(r)); }
  void add(const std::string& id, const std::string& anchor,
           const TensorZeroResult& r, double wall_ms = 0.0);
  bool all_passed() const;
};

std::uint64_t fnv1a64(std::string_view data);

/// Deterministic given (input, seed): wall-clock durations are kept out
/// of the serialized form and there is no timestamp.
nlohmann::json report_to_json(const VerificationReport& rep);

void print_report(std::ostream& os, const VerificationReport& rep);

}  // namespace qe
