// Acceptance battery: ten end-to-end criteria, one pass/fail line each.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "qe/ppwave.hpp"
#include "qe/suite.hpp"

using namespace qe;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void verdict(int number, const std::string& name, bool pass,
             const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << number << ": "
            << name;
  if (!detail.empty()) std::cout << " -- " << detail;
  std::cout << std::endl;
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Expr random_profile(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> deg(0, 4), den(1, 4);
  std::vector<Expr> terms;
  Expr u = Expr::symbol("u"), x1 = Expr::symbol("x1"), x2 = Expr::symbol("x2");
  for (int t = 0; t < 6; ++t) {
    int a = deg(rng), b = deg(rng), c = deg(rng);
    int d = den(rng);
    std::uniform_int_distribution<int> num(-5 * d, 5 * d);
    int n = num(rng);
    if (n == 0) n = 1;
    terms.push_back(Expr::number(Rational(n, d)) * Expr::pow(u, a) *
                    Expr::pow(x1, b) * Expr::pow(x2, c));
  }
  return Expr::add(terms);
}

// Engine Weyl/div W of a wave profile against the closed forms; the only
// independent nonzero slots are (u, x_a, u, x_b) and (u, x_a, u).
bool closed_forms_match(const Expr& H, const ZeroTester& zt, bool flip_sign) {
  PPWaveSpec spec = PPWaveSpec::make(H);
  MetricField g = build_ppwave(spec);
  Curvature curv = compute_curvature(g);
  TensorField W = weyl(g, curv);
  TensorField dW = div_weyl(g, W, curv.gamma);
  PPWaveClosedForms cf = closed_form_weyl_divweyl(spec);
  const Expr sign = flip_sign ? Expr::integer(-1) : Expr::integer(1);
  // the only independent nonzero slots are W(u, x_a, u, x_b) and
  // div W(u, x_a, u); the rest follows from the pair symmetries
  TensorField We(g.chart(), 4, 0), dWe(g.chart(), 3, 0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      Expr w = sign * cf.w[a][b];
      We.at(0, a + 2, 0, b + 2) = w;
      We.at(a + 2, 0, 0, b + 2) = -w;
      We.at(0, a + 2, b + 2, 0) = -w;
      We.at(a + 2, 0, b + 2, 0) = w;
    }
    dWe.at(0, a + 2, 0) = sign * cf.d[a];
    dWe.at(a + 2, 0, 0) = -(sign * cf.d[a]);
  }
  return is_zeroish(tensor_zero_status(W - We, zt).status) &&
         is_zeroish(tensor_zero_status(dW - dWe, zt).status);
}

bool fragment_ok(const SuiteFragment& frag, std::string* why = nullptr) {
  for (const auto& [id, r] : frag)
    if (!is_zeroish(r.status)) {
      if (why) *why = id;
      return false;
    }
  return true;
}

TensorZeroResult bochner_residual(const MetricField& g, const Expr& f,
                                  const ZeroTester& zt) {
  // 1/2 Lap |grad f|^2 = |Hes f|^2 + rho(grad f, grad f) + g(grad Lap f, grad f)
  Curvature curv = compute_curvature(g);
  TensorField hes = hessian(g, f, curv.gamma);
  Expr gns = grad_norm_sq(g, f);
  Expr lap = laplacian(g, f, curv.gamma);
  const int n = g.dim();
  std::vector<Expr> hes2_terms, ric_terms, cross_terms;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          hes2_terms.push_back(g.inv(i, k) * g.inv(j, l) * hes.at(i, j) *
                               hes.at(k, l));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          ric_terms.push_back(g.inv(i, j) * g.inv(k, l) * curv.ricci.at(i, k) *
                              f.diff(g.chart().coords[j]) *
                              f.diff(g.chart().coords[l]));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cross_terms.push_back(g.inv(i, j) * lap.diff(g.chart().coords[i]) *
                            f.diff(g.chart().coords[j]));
  Expr lhs = Expr::number(Rational(1, 2)) *
             laplacian(g, gns, curv.gamma);
  Expr rhs = Expr::add(hes2_terms) + Expr::add(ric_terms) + Expr::add(cross_terms);
  auto r = zt.test(lhs - rhs);
  return {r.status, r.max_abs, r.exact};
}

}  // namespace

int main() {
  const ZeroTester zt(42);
  const std::string corpus_dir = QE_CORPUS_DIR;
  const auto corpus = load_corpus(corpus_dir);

  // ---- 1: randomized closed-form cross-check ------------------------------
  {
    auto t0 = Clock::now();
    std::mt19937_64 rng(42);
    bool ok = true;
    for (int i = 0; i < 10 && ok; ++i)
      ok = closed_forms_match(random_profile(rng), zt, false);
    double dt = seconds_since(t0);
    std::ostringstream d;
    d << "10 random polynomial profiles, " << dt << " s";
    verdict(1, "brute-force Weyl and div W match the closed forms", ok && dt < 10.0,
            d.str());
  }

  // ---- 2: explicit structure on a plane wave ------------------------------
  {
    Expr u = Expr::symbol("u"), x1 = Expr::symbol("x1"), x2 = Expr::symbol("x2");
    MetricField g = build_ppwave(x1 * x1 + x2 * x2);
    QEStructure q(g, u * u, Rational(0), zt);
    bool ok = q.is_qe() && q.qe_status().exact && q.lambda().is_zero_literal();
    verdict(2, "plane-wave potential satisfies the structure equation exactly", ok,
            ok ? "residual and lambda are the literal zero" : "residual nonzero");
  }

  // ---- 3: solvability equivalence across profiles -------------------------
  {
    auto t0 = Clock::now();
    int tested = 0;
    bool ok = true;
    std::ostringstream d;
    for (const auto& e : corpus) {
      if (!e.doc.is_ppwave()) continue;
      PPWaveSpec spec = PPWaveSpec::make(e.doc.resolve(*e.doc.ppwave_H));
      ++tested;
      // (iii) profile condition, (ii) harmonic Weyl by brute force
      bool iii = is_zeroish(harmonic_weyl_condition(spec, zt));
      MetricField g = build_ppwave(spec);
      Curvature curv = compute_curvature(g);
      TensorField W = weyl(g, curv);
      bool ii = is_zeroish(
          tensor_zero_status(div_weyl(g, W, curv.gamma), zt).status);
      if (ii != iii) {
        ok = false;
        d << e.name << ": divergence and profile conditions disagree; ";
        continue;
      }
      if (!iii) continue;
      // (i) a potential exists: integrate the reduced equation and certify
      PotentialODEProblem prob;
      prob.phi = transverse_laplacian(spec.H).substitute(
          {{"x1", Expr()}, {"x2", Expr()}});
      prob.mu = e.doc.mu.value_or(Rational(0));
      ODESolution sol = solve_potential_ode(prob);
      if (sol.blew_up || certify_trajectory(prob.phi, prob.mu, sol) > 1e-6) {
        ok = false;
        d << e.name << ": trajectory fails certification; ";
      }
      // consequence: the Weyl-gradient contraction vanishes for du
      std::vector<Expr> gradf(4);
      gradf[1] = Expr::integer(1);  // grad of f(u) is along d_v (null)
      if (!is_zeroish(tensor_zero_status(contract_last(W, gradf), zt).status)) {
        ok = false;
        d << e.name << ": Weyl-gradient contraction nonzero; ";
      }
    }
    double dt = seconds_since(t0);
    d << tested << " profiles, " << dt << " s";
    verdict(3, "potential solvability equivalence on the profile corpus",
            ok && tested >= 6 && dt < 30.0, d.str());
  }

  // ---- 4: differential identity chain -------------------------------------
  {
    bool ok = true;
    int tested = 0;
    bool saw_mu0 = false, saw_mu1 = false;
    std::ostringstream d;
    for (const auto& e : corpus) {
      if (!e.doc.potential || !e.doc.mu || e.doc.chart.dim() != 4) continue;
      MetricField g = metric_from_document(e.doc);
      QEStructure q(g, e.doc.resolve(*e.doc.potential), *e.doc.mu, zt);
      if (!q.is_qe()) continue;
      ++tested;
      saw_mu0 = saw_mu0 || *e.doc.mu == 0;
      saw_mu1 = saw_mu1 || *e.doc.mu == 1;
      IdentityResiduals ir = identity_residuals(q);
      for (const TensorField* t :
           {&ir.grad_laplacian, &ir.grad_scalar, &ir.curvature_grad,
            &ir.weyl_cotton})
        if (!is_zeroish(tensor_zero_status(*t, zt).status)) {
          ok = false;
          d << e.name << " fails; ";
        }
    }
    d << tested << " structures";
    verdict(4, "gradient identities for the curvature hold on the corpus",
            ok && tested >= 3 && saw_mu0 && saw_mu1, d.str());
  }

  // ---- 5: null-gradient invariant chain ------------------------------------
  {
    Expr u = Expr::symbol("u"), x1 = Expr::symbol("x1"), x2 = Expr::symbol("x2");
    MetricField g = build_ppwave(x1 * x1 + x2 * x2);
    QEStructure q(g, u * u, Rational(0), zt);
    NumericPoint p = sample_point(g.chart());
    std::string why;
    bool ok = causal_character(q, p, zt) == CausalCharacter::Null &&
              fragment_ok(isotropic_invariant_suite(q, p, zt), &why) &&
              fragment_ok(parallel_distribution_check(g, q.f(), zt), &why);
    verdict(5, "null-gradient invariants and the parallel gradient span", ok,
            ok ? "eigenvector, trace, constancy, rank and span checks" : why);
  }

  // ---- 6: classical identities sampled below 1e-8 --------------------------
  {
    bool ok = true;
    double worst = 0;
    std::ostringstream d;
    for (const auto& e : corpus) {
      MetricField g = metric_from_document(e.doc);
      Curvature curv = compute_curvature(g);
      auto absorb = [&](const TensorZeroResult& r, const char* what) {
        worst = std::max(worst, r.max_abs);
        if (!is_zeroish(r.status) || r.max_abs > 1e-8) {
          ok = false;
          d << e.name << " " << what << "; ";
        }
      };
      absorb(tensor_zero_status(first_bianchi_residual(curv.riemann), zt),
             "first Bianchi");
      // contracted second Bianchi: div rho = d tau / 2
      TensorField divr = divergence_sym2(g, curv.ricci, curv.gamma);
      TensorField half_dtau(g.chart(), 1, 0);
      for (int i = 0; i < g.dim(); ++i)
        half_dtau.at({i}) = Expr::number(Rational(1, 2)) *
                            curv.tau.diff(g.chart().coords[i]);
      absorb(tensor_zero_status(divr - half_dtau, zt), "contracted Bianchi");
      if (e.doc.potential)
        absorb(bochner_residual(g, e.doc.resolve(*e.doc.potential), zt),
               "Laplacian commutation");
    }
    d << "worst sampled residual " << worst;
    verdict(6, "Bianchi and Laplacian-commutation identities on the corpus", ok,
            d.str());
  }

  // ---- 7: conformal transformation rules -----------------------------------
  {
    bool ok = true;
    std::ostringstream d;
    int pairs = 0;
    auto pair_check = [&](const MetricField& g, const Expr& f, const char* name) {
      ++pairs;
      if (!is_zeroish(tensor_zero_status(conformal_ricci_residual(g, f), zt).status) ||
          !is_zeroish(
              tensor_zero_status(conformal_divweyl_residual(g, f), zt).status)) {
        ok = false;
        d << name << " fails; ";
      }
    };
    {
      Chart ch{{"t", "x", "y", "z"}};
      std::vector<Expr> comp(16);
      comp[0] = Expr::integer(-1);
      for (int i = 1; i < 4; ++i) comp[i * 4 + i] = Expr::integer(1);
      pair_check(MetricField::from_components(ch, comp), Expr::symbol("t"),
                 "flat Lorentz / t");
    }
    Expr u = Expr::symbol("u"), x1 = Expr::symbol("x1"), x2 = Expr::symbol("x2");
    pair_check(build_ppwave(x1 * x2), u, "mixed wave profile / u");
    pair_check(build_ppwave(x1 * x1 + x2 * x2), u, "plane wave / u");
    d << pairs << " metric/factor pairs";
    verdict(7, "Ricci and divergence transformation under conformal rescaling",
            ok && pairs >= 3, d.str());
  }

  // ---- 8: integrator order and oracle agreement ----------------------------
  {
    bool ok = true;
    std::ostringstream d;
    auto max_err = [](const PotentialODEProblem& prob, auto exact) {
      ODESolution sol = solve_potential_ode(prob);
      double worst = 0;
      for (const auto& s : sol.samples)
        worst = std::max(worst, std::abs(s.f - exact(s.u)));
      return worst;
    };

    // nominal case: phi = -2, mu = 1 admits the linear solution f = u
    PotentialODEProblem lit;
    lit.phi = Expr::integer(-2);
    lit.mu = 1;
    lit.fp0 = 1;
    auto linear = [](double uu) { return uu; };
    double e1 = max_err(lit, linear);
    lit.step = 5e-4;
    double e2 = max_err(lit, linear);
    if (e1 >= 1e-9) {
      ok = false;
      d << "coarse-step error " << e1 << " too large; ";
    }
    if (e1 < 1e-12 && e2 < 1e-12) {
      // both runs sit at the roundoff floor (the solution is an exact
      // fixed point of the scheme), so the order ratio is unmeasurable;
      // remeasure on a nearby trajectory with a known closed form
      PotentialODEProblem alt = lit;
      alt.fp0 = 2;
      alt.u_end = 0.52;
      const double c = 0.5 * std::log(3.0);
      auto closed = [c](double uu) {
        return std::log(std::sinh(c) / std::sinh(c - uu));
      };
      alt.step = 1e-3;
      double a1 = max_err(alt, closed);
      alt.step = 5e-4;
      double a2 = max_err(alt, closed);
      double ratio = a1 / a2;
      d << "order ratio " << ratio << " on the shifted trajectory";
      if (ratio < 12 || ratio > 20) ok = false;
    } else {
      double ratio = e1 / e2;
      d << "order ratio " << ratio;
      if (ratio < 12 || ratio > 20) ok = false;
    }

    // transcendental forcing: companion-equation oracle stays close
    PotentialODEProblem trig;
    trig.phi = Expr::call(Fn::Sin, Expr::symbol("u"));
    trig.mu = 1;
    ODESolution tsol = solve_potential_ode(trig);
    d << ", oracle discrepancy " << tsol.max_discrepancy;
    if (tsol.max_discrepancy > 1e-6) ok = false;
    verdict(8, "integrator convergence order and oracle agreement", ok, d.str());
  }

  // ---- 9: negative controls -------------------------------------------------
  {
    bool ok = true;
    std::ostringstream d;
    Expr x1 = Expr::symbol("x1");
    // a non-harmonic profile must show a nonvanishing divergence
    PPWaveSpec cubic = PPWaveSpec::make(Expr::pow(x1, 3));
    MetricField g = build_ppwave(cubic);
    Curvature curv = compute_curvature(g);
    TensorField dW = div_weyl(g, weyl(g, curv), curv.gamma);
    if (is_zeroish(tensor_zero_status(dW, zt).status)) {
      ok = false;
      d << "cubic-profile divergence not flagged; ";
    }
    if (!(dW.at(0, 2, 0) - Expr::number(Rational(-3, 2))).is_zero_literal()) {
      ok = false;
      d << "cubic-profile divergence value wrong; ";
    }
    // the profile condition must refuse a transverse-dependent Laplacian
    if (is_zeroish(
            harmonic_weyl_condition(PPWaveSpec::make(Expr::pow(x1, 4)), zt))) {
      ok = false;
      d << "quartic profile slipped through the solvability gate; ";
    }
    // a sign injected into the closed form must be caught
    std::mt19937_64 rng(42);
    if (closed_forms_match(random_profile(rng), zt, /*flip_sign=*/true)) {
      ok = false;
      d << "flipped-sign closed form not detected; ";
    }
    verdict(9, "negative controls are rejected", ok,
            ok ? "divergence, solvability gate and sign injection all flagged"
               : d.str());
  }

  // ---- 10: command-line determinism -----------------------------------------
  {
    auto t0 = Clock::now();
    const std::string cli = QE_CLI_PATH;
    const std::string j1 = "acceptance_run1.json", j2 = "acceptance_run2.json";
    auto run = [&](const std::string& out) {
      std::string cmd = cli + " suite --corpus " + corpus_dir + " --json " + out +
                        " > " + out + ".log 2>&1";
      return std::system(cmd.c_str());
    };
    int rc1 = run(j1), rc2 = run(j2);
    bool ok = rc1 == 0 && rc2 == 0;
    std::ostringstream d;
    if (!ok) d << "exit codes " << rc1 << "/" << rc2 << "; ";
    auto slurp = [](const std::string& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    std::string b1 = slurp(j1), b2 = slurp(j2);
    if (b1.empty() || b1 != b2) {
      ok = false;
      d << "reports differ between runs; ";
    }
    try {
      nlohmann::json j = nlohmann::json::parse(b1);
      for (const char* key :
           {"report_version", "tool_version", "input_hash", "seed", "checks",
            "all_passed"})
        if (!j.contains(key)) {
          ok = false;
          d << "report misses " << key << "; ";
        }
      if (!j["all_passed"].get<bool>()) {
        ok = false;
        d << "suite reported failures; ";
      }
      for (const auto& c : j["checks"])
        for (const char* key : {"id", "anchor", "status", "residual", "expected_pass"})
          if (!c.contains(key)) {
            ok = false;
            d << "check record misses " << key << "; ";
          }
    } catch (const std::exception& ex) {
      ok = false;
      d << "report is not valid JSON: " << ex.what() << "; ";
    }
    double dt = seconds_since(t0);
    d << "two full runs in " << dt << " s";
    verdict(10, "repeated tool invocations produce identical valid reports",
            ok && dt < 60.0, d.str());
  }

  std::cout << (failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED")
            << " (" << (10 - failures) << "/10)" << std::endl;
  return failures == 0 ? 0 : 1;
}
