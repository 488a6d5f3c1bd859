// Command-line front end: curvature printout, structure check, potential
// ODE integration, and the full verification suite.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qe/ppwave.hpp"
#include "qe/suite.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitInputError = 2;

struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

qe::MetricDocument parse_file(const std::string& path) {
  const std::string source = read_file(path);
  try {
    return qe::parse_document(source);
  } catch (const qe::ParseError& e) {
    throw InputError(path + ":" + e.what());
  }
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InputError(std::string("QE_SEED is not an integer: ") + env);
    }
  }
  return 42;
}

std::string resolve_corpus_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("QE_CORPUS")) return env;
  return QE_CORPUS_DIR;
}

qe::NumericPoint parse_point(const std::string& spec, const qe::Chart& chart) {
  qe::NumericPoint p;
  std::istringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw InputError("--point entries must look like coord=value: " + item);
    const std::string name = item.substr(0, eq);
    if (chart.index_of(name) < 0)
      throw InputError("--point names unknown coordinate " + name);
    try {
      p[name] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw InputError("--point value is not a number: " + item);
    }
  }
  for (const auto& c : chart.coords)
    if (!p.count(c)) throw InputError("--point misses coordinate " + c);
  return p;
}

void print_components(std::ostream& os, const std::string& label,
                      const qe::TensorField& T, const qe::ZeroTester& zt,
                      bool upper_first) {
  const int n = T.dim();
  const int rank = T.rank();
  std::vector<int> idx(rank, 0);
  bool any = false;
  while (true) {
    const qe::Expr& e = T.at(idx);
    if (!qe::is_zeroish(zt.status(e))) {
      os << "  " << label;
      for (int s = 0; s < rank; ++s) {
        // Christoffel storage is [k][i][j] for Gamma^k_ij: print the
        // upper slot first, then the symmetric pair.
        os << (upper_first && s == 0 ? "^" : "_")
           << T.chart().coords[idx[s]];
      }
      os << " = " << e.str() << '\n';
      any = true;
    }
    int s = rank - 1;
    for (; s >= 0; --s) {
      if (++idx[s] < n) break;
      idx[s] = 0;
    }
    if (s < 0) break;
  }
  if (!any) os << "  " << label << " = 0\n";
}

int cmd_curvature(const std::string& path) {
  const qe::MetricDocument doc = parse_file(path);
  const qe::MetricField g = qe::metric_from_document(doc);
  const qe::Curvature curv = qe::compute_curvature(g);
  qe::ZeroTester zt(default_seed());

  std::cout << "chart:";
  for (const auto& c : g.chart().coords) std::cout << ' ' << c;
  std::cout << "\nChristoffel symbols:\n";
  print_components(std::cout, "Gamma", curv.gamma, zt, /*upper_first=*/true);
  std::cout << "curvature (0,4):\n";
  print_components(std::cout, "R", curv.riemann, zt, false);
  std::cout << "Ricci:\n";
  print_components(std::cout, "rho", curv.ricci, zt, false);
  std::cout << "scalar curvature:\n  tau = " << curv.tau.str() << '\n';
  if (g.dim() == 4) {
    const qe::TensorField W = qe::weyl(g, curv);
    std::cout << "Weyl:\n";
    print_components(std::cout, "W", W, zt, false);
    std::cout << "div W:\n";
    print_components(std::cout, "divW", qe::div_weyl(g, W, curv.gamma), zt,
                     false);
  }
  return kExitOk;
}

bool report_fragment(const qe::SuiteFragment& frag) {
  bool ok = true;
  for (const auto& [id, r] : frag) {
    const bool pass = qe::is_zeroish(r.status);
    std::cout << (pass ? "  PASS " : "  FAIL ") << id << " ["
              << qe::zero_status_name(r.status);
    if (!r.exact) std::cout << ", max " << r.max_abs;
    std::cout << "]\n";
    ok = ok && pass;
  }
  return ok;
}

int cmd_check(const std::string& path, const std::string& point_spec) {
  const qe::MetricDocument doc = parse_file(path);
  if (!doc.potential) throw InputError(path + ": no potential declared");
  if (!doc.mu) throw InputError(path + ": no mu declared");
  const qe::MetricField g = qe::metric_from_document(doc);
  const qe::NumericPoint p = point_spec.empty()
                                 ? qe::sample_point(g.chart())
                                 : parse_point(point_spec, g.chart());
  const qe::ZeroTester zt(default_seed());
  const qe::QEStructure q(g, doc.resolve(*doc.potential), *doc.mu, zt);

  const auto& qs = q.qe_status();
  std::cout << "quasi-Einstein residual: " << qe::zero_status_name(qs.status);
  if (!qs.exact) std::cout << " (max " << qs.max_abs << ")";
  std::cout << "\nmu = " << *doc.mu << "\nlambda = " << q.lambda().str() << '\n';
  if (!q.is_qe()) {
    std::cout << "not a quasi-Einstein structure; no further checks apply\n";
    return kExitVerificationFailure;
  }

  bool ok = true;
  const qe::CausalCharacter cc = qe::causal_character(q, p, zt);
  std::cout << "gradient causal character: " << qe::causal_character_name(cc)
            << '\n';
  switch (cc) {
    case qe::CausalCharacter::Null: {
      std::cout << "isotropic invariants:\n";
      ok = report_fragment(qe::isotropic_invariant_suite(q, p, zt)) && ok;
      std::cout << "parallel gradient span:\n";
      ok = report_fragment(qe::parallel_distribution_check(g, q.f(), zt)) && ok;
      break;
    }
    case qe::CausalCharacter::Spacelike:
    case qe::CausalCharacter::Timelike: {
      if (*doc.mu == qe::Rational(-1, 2)) {
        std::cout << "mu = -1/2: structure classification inapplicable\n";
        const auto hc = qe::harmonicity_checks(g, q.f(), zt);
        ok = report_fragment({{"divw-vanishes", hc.divw},
                              {"weyl-gradient-contraction", hc.w_gradf}}) &&
             ok;
        break;
      }
      std::cout << "orthonormal-frame structure:\n";
      try {
        ok = report_fragment(qe::nonisotropic_structure_checks(q, p, zt)) && ok;
      } catch (const qe::RefusedError& e) {
        std::cout << "  refused: " << e.what() << '\n';
      }
      break;
    }
    case qe::CausalCharacter::ZeroVector:
      std::cout << "gradient vanishes at the sample point; nothing to route\n";
      break;
  }
  std::cout << (ok ? "CHECK PASSED\n" : "CHECK FAILED\n");
  return ok ? kExitOk : kExitVerificationFailure;
}

int cmd_solve(const std::string& path, const std::string& interval, double step,
              double f0, double fp0, const std::string& out) {
  const qe::MetricDocument doc = parse_file(path);
  if (!doc.is_ppwave())
    throw InputError(path + ": solve needs a wave-profile document");
  const qe::PPWaveSpec spec = qe::PPWaveSpec::make(doc.resolve(*doc.ppwave_H));
  const qe::ZeroTester zt(default_seed());
  if (!qe::is_zeroish(qe::harmonic_weyl_condition(spec, zt))) {
    std::cerr << "the transverse profile Laplacian depends on the transverse "
                 "coordinates; no potential of u alone can exist\n";
    return kExitVerificationFailure;
  }

  qe::PotentialODEProblem prob;
  prob.phi = qe::transverse_laplacian(spec.H).substitute(
      {{"x1", qe::Expr()}, {"x2", qe::Expr()}});
  prob.mu = doc.mu.value_or(qe::Rational(0));
  prob.f0 = f0;
  prob.fp0 = fp0;
  prob.step = step;
  {
    std::istringstream ss(interval);
    char comma = 0;
    if (!(ss >> prob.u0 >> comma >> prob.u_end) || comma != ',')
      throw InputError("--interval must look like a,b: " + interval);
    if (prob.u_end <= prob.u0) throw InputError("--interval must be increasing");
  }
  if (step <= 0) throw InputError("--step must be positive");

  const qe::ODESolution sol = qe::solve_potential_ode(prob);
  if (out.empty()) {
    qe::write_trajectory_csv(std::cout, sol);
  } else {
    std::ofstream os(out);
    if (!os) throw InputError("cannot write " + out);
    qe::write_trajectory_csv(os, sol);
  }

  std::cerr << "samples: " << sol.samples.size() << '\n';
  if (sol.blew_up)
    std::cerr << "blow-up: |f'| exceeded 1e6 near u = " << sol.blowup_u << '\n';
  if (sol.h_breakdown)
    std::cerr << "companion h reached 0 near u = " << sol.h_breakdown_u
              << "; the log-based oracle stops there\n";
  std::cerr << "max oracle discrepancy: " << sol.max_discrepancy << '\n';
  const double cert = qe::certify_trajectory(prob.phi, prob.mu, sol);
  std::cerr << "max pointwise equation residual: " << cert << '\n';
  return kExitOk;
}

int cmd_suite(std::uint64_t seed, const std::string& corpus_flag,
              const std::string& json_out) {
  const std::string dir = resolve_corpus_dir(corpus_flag);
  const auto corpus = qe::load_corpus(dir);
  if (corpus.empty()) throw InputError("no metric documents found in " + dir);
  const qe::VerificationReport rep = qe::run_suite(corpus, seed);
  qe::print_report(std::cout, rep);
  if (!json_out.empty()) {
    std::ofstream os(json_out);
    if (!os) throw InputError("cannot write " + json_out);
    os << qe::report_to_json(rep).dump(2) << '\n';
  }
  return rep.all_passed() ? kExitOk : kExitVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi-Einstein structure verification"};
  app.require_subcommand(1);

  std::string file, point_spec, interval, out, corpus_flag, json_out;
  double step = 1e-3, f0 = 0, fp0 = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto* curvature = app.add_subcommand(
      "curvature", "print the nonzero curvature components of a metric");
  curvature->add_option("file", file, "metric document")->required();

  auto* check = app.add_subcommand(
      "check", "verify the quasi-Einstein condition and the routed invariants");
  check->add_option("file", file, "metric document with potential and mu")
      ->required();
  check->add_option("--point", point_spec,
                    "evaluation point as coord=value,... (default: built-in)");

  auto* solve = app.add_subcommand(
      "solve", "integrate the potential equation of a wave profile");
  solve->add_option("file", file, "wave-profile document")->required();
  solve->add_option("--interval", interval, "integration interval a,b")
      ->required();
  solve->add_option("--step", step, "integration step");
  solve->add_option("--f0", f0, "initial value");
  solve->add_option("--fp0", fp0, "initial derivative");
  solve->add_option("--out", out, "CSV output path (default: stdout)");

  auto* suite = app.add_subcommand("suite", "run the full verification battery");
  suite->add_option("--seed", seed, "sampling seed (default: QE_SEED or 42)")
      ->each([&](const std::string&) { seed_given = true; });
  suite->add_option("--corpus", corpus_flag,
                    "metric-document directory (default: QE_CORPUS or built-in)");
  suite->add_option("--json", json_out, "write the report as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (curvature->parsed()) return cmd_curvature(file);
    if (check->parsed()) return cmd_check(file, point_spec);
    if (solve->parsed()) return cmd_solve(file, interval, step, f0, fp0, out);
    if (suite->parsed())
      return cmd_suite(seed_given ? seed : default_seed(), corpus_flag,
                       json_out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const qe::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
