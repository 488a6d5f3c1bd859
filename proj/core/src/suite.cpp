#include "qe/suite.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace qe {

namespace fs = std::filesystem;

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
  std::vector<CorpusEntry> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".qe") continue;
    std::ifstream in(entry.path());
    std::stringstream ss;
    ss << in.rdbuf();
    CorpusEntry ce;
    ce.name = entry.path().stem().string();
    ce.source = ss.str();
    ce.doc = parse_document(ce.source);
    out.push_back(std::move(ce));
  }
  std::sort(out.begin(), out.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) { return a.name < b.name; });
  return out;
}

MetricField metric_from_document(const MetricDocument& doc) {
  if (doc.is_ppwave()) {
    return build_ppwave(PPWaveSpec::make(doc.resolve(*doc.ppwave_H)));
  }
  return MetricField::from_document(doc);
}

NumericPoint sample_point(const Chart& chart) {
  NumericPoint p;
  for (int i = 0; i < chart.dim(); ++i) {
    p[chart.coords[i]] = 0.37 + 0.211 * i;
  }
  return p;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Runner {
  VerificationReport& rep;
  const ZeroTester& zt;

  template <typename F>
  void check(const std::string& id, const std::string& anchor, F&& fn,
             bool expected_pass = true, const std::string& detail = "") {
    CheckRecord rec;
    rec.id = id;
    rec.anchor = anchor;
    rec.expected_pass = expected_pass;
    rec.detail = detail;
    auto t0 = Clock::now();
    try {
      TensorZeroResult r = fn();
      rec.status = from_zero_status(r.status);
      rec.max_abs = r.max_abs;
      rec.exact = r.exact;
    } catch (const RefusedError& e) {
      rec.status = CheckStatus::Refused;
      rec.detail = e.what();
    } catch (const std::exception& e) {
      rec.status = CheckStatus::Error;
      rec.detail = e.what();
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    rep.add(std::move(rec));
  }

  TensorZeroResult scalar(const Expr& e) const {
    return combine_zero(TensorZeroResult{}, zt.test(e));
  }
};

// Expected full (0,4) Weyl and (0,3) div W of a pp-wave, assembled from
// the closed forms: slots (u, x_a, u, x_b) for W and (u, x_a, u) for
// div W, everything else zero.
TensorField expected_ppwave_weyl(const Chart& ch, const PPWaveClosedForms& cf) {
  TensorField W(ch, 4, 0, Symmetry::RiemannType);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const Expr& w = cf.w[a][b];
      int i = a + 2, j = b + 2;
      W.at(0, i, 0, j) = w;
      W.at(i, 0, 0, j) = -w;
      W.at(0, i, j, 0) = -w;
      W.at(i, 0, j, 0) = w;
    }
  }
  return W;
}

TensorField expected_ppwave_divweyl(const Chart& ch, const PPWaveClosedForms& cf) {
  TensorField D(ch, 3, 0);
  for (int a = 0; a < 2; ++a) {
    D.at(0, a + 2, 0) = cf.d[a];
    D.at(a + 2, 0, 0) = -cf.d[a];
  }
  return D;
}

TensorZeroResult compare_ppwave_closed_forms(const Expr& H, const ZeroTester& zt) {
  PPWaveSpec spec = PPWaveSpec::make(H);
  MetricField g = build_ppwave(spec);
  Curvature curv = compute_curvature(g);
  TensorField W = weyl(g, curv);
  TensorField dW = div_weyl(g, W, curv.gamma);
  PPWaveClosedForms cf = closed_form_weyl_divweyl(spec);
  TensorZeroResult r = tensor_zero_status(W - expected_ppwave_weyl(g.chart(), cf), zt);
  TensorZeroResult rd = tensor_zero_status(dW - expected_ppwave_divweyl(g.chart(), cf), zt);
  r = combine_zero(r, ZeroTester::Result{rd.status, rd.max_abs, rd.exact});
  return r;
}

// 1-form residual of div T = target for symmetric T.
TensorField div_residual(const MetricField& g, const TensorField& T,
                         const TensorField& gamma, const std::vector<Expr>& target) {
  TensorField d = divergence_sym2(g, T, gamma);
  TensorField out(g.chart(), 1, 0);
  for (int i = 0; i < g.dim(); ++i) {
    out.components()[i] = d.components()[i] - target[i];
  }
  return out;
}

Expr random_polynomial_profile(std::mt19937_64& rng) {
  // degree <= 4 monomials in (u, x1, x2), rational coefficients in [-5,5]
  std::vector<std::array<int, 3>> monomials;
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; a + b <= 4; ++b) {
      for (int c = 0; a + b + c <= 4; ++c) monomials.push_back({a, b, c});
    }
  }
  std::uniform_int_distribution<size_t> pick(0, monomials.size() - 1);
  std::uniform_int_distribution<int> den_d(1, 4);
  Expr u = Expr::symbol("u"), x1 = Expr::symbol("x1"), x2 = Expr::symbol("x2");
  std::vector<Expr> terms;
  for (int t = 0; t < 6; ++t) {
    auto [a, b, c] = monomials[pick(rng)];
    int den = den_d(rng);
    std::uniform_int_distribution<int> num_d(-5 * den, 5 * den);
    int num = num_d(rng);
    if (num == 0) num = 1;
    Expr term = Expr::number(Rational(num, den));
    if (a) term = term * Expr::pow(u, a);
    if (b) term = term * Expr::pow(x1, b);
    if (c) term = term * Expr::pow(x2, c);
    terms.push_back(term);
  }
  return Expr::add(std::move(terms));
}

}  // namespace

VerificationReport run_suite(const std::vector<CorpusEntry>& corpus,
                             std::uint64_t seed) {
  VerificationReport rep;
  rep.seed = seed;
  {
    std::string all;
    for (const auto& e : corpus) {
      all += e.name;
      all += '\n';
      all += e.source;
    }
    rep.input_hash = fnv1a64(all);
  }
  ZeroTester zt(seed);
  Runner run{rep, zt};
  Expr u = Expr::symbol("u"), x1 = Expr::symbol("x1"), x2 = Expr::symbol("x2");

  // -- calibration against the closed forms ---------------------------------
  run.check("calibration/weyl-closed-form",
            "pp-wave Weyl and div W closed forms pin the curvature sign convention",
            [&] {
              TensorZeroResult r = compare_ppwave_closed_forms(Expr::pow(x1, 3), zt);
              TensorZeroResult r2 = compare_ppwave_closed_forms(u * x1 * x2, zt);
              return combine_zero(r, ZeroTester::Result{r2.status, r2.max_abs, r2.exact});
            });
  run.check("calibration/sphere-scalar-curvature",
            "round unit 2-sphere has scalar curvature 2", [&] {
              Chart ch{{"th", "ph"}};
              std::vector<Expr> g(4, Expr());
              g[0] = Expr::integer(1);
              g[3] = Expr::pow(Expr::call(Fn::Sin, Expr::symbol("th")), 2);
              MetricField sph = MetricField::from_components(ch, std::move(g));
              Curvature c = compute_curvature(sph);
              return run.scalar(c.tau - Expr::integer(2));
            });

  // -- classical identities on every corpus metric --------------------------
  for (const auto& e : corpus) {
    MetricField g = metric_from_document(e.doc);
    Curvature curv = compute_curvature(g);
    const int n = g.dim();
    const auto& coords = g.chart().coords;
    run.check(e.name + "/first-bianchi", "cyclic sum of the curvature tensor vanishes",
              [&] { return tensor_zero_status(first_bianchi_residual(curv.riemann), zt); });
    run.check(e.name + "/second-bianchi-contracted", "div rho = d tau / 2", [&] {
      std::vector<Expr> half_dtau(n);
      for (int i = 0; i < n; ++i) {
        half_dtau[i] = Expr::number(Rational(1, 2)) * curv.tau.diff(coords[i]);
      }
      return tensor_zero_status(div_residual(g, curv.ricci, curv.gamma, half_dtau), zt);
    });
    if (n == 4) {
      run.check(e.name + "/weyl-trace-free", "all metric traces of W vanish", [&] {
        TensorField W = weyl(g, curv);
        TensorZeroResult r;
        for (int j = 0; j < n; ++j) {
          for (int l = 0; l < n; ++l) {
            std::vector<Expr> terms;
            for (int i = 0; i < n; ++i) {
              for (int k = 0; k < n; ++k) terms.push_back(g.inv(i, k) * W.at(i, j, k, l));
            }
            r = combine_zero(r, zt.test(Expr::add(std::move(terms))));
          }
        }
        return r;
      });
    }
    if (e.doc.potential) {
      Expr f = e.doc.resolve(*e.doc.potential);
      run.check(e.name + "/bochner", "div Hes_f = d Lap f + rho(grad f, .)", [&] {
        TensorField hes = hessian(g, f, curv.gamma);
        Expr lap = laplacian(g, f, curv.gamma);
        TensorField grad = gradient(g, f);
        std::vector<Expr> target(n);
        for (int i = 0; i < n; ++i) {
          std::vector<Expr> terms{lap.diff(coords[i])};
          for (int j = 0; j < n; ++j) {
            terms.push_back(curv.ricci.at(i, j) * grad.components()[j]);
          }
          target[i] = Expr::add(std::move(terms));
        }
        return tensor_zero_status(div_residual(g, hes, curv.gamma, target), zt);
      });
    }
  }

  // -- quasi-Einstein structures --------------------------------------------
  for (const auto& e : corpus) {
    if (!e.doc.potential || !e.doc.mu) continue;
    MetricField g = metric_from_document(e.doc);
    Expr f = e.doc.resolve(*e.doc.potential);
    QEStructure q(g, f, *e.doc.mu, zt);
    NumericPoint p = sample_point(g.chart());
    run.check(e.name + "/qe-residual", "Hes_f + rho - mu df(x)df = lambda g",
              [&] { return q.qe_status(); });
    run.check(e.name + "/trace-relation",
              "n lambda = Lap f + tau - mu |grad f|^2 (construction invariant)", [&] {
                return run.scalar(Expr::integer(g.dim()) * q.lambda() - q.laplacian() -
                                  q.curvature().tau +
                                  Expr::number(q.mu()) * q.grad_norm_sq());
              });
    if (g.dim() == 4) {
      const char* anchors[4] = {
          "gradient of the traced equation (Bochner + contracted Bianchi)",
          "scalar-curvature gradient identity",
          "R(X,Y,Z,grad f) expansion through d lambda and nabla rho",
          "W(X,Y,Z,grad f) = 2 div W + scalar/Ricci lower-order terms"};
      run.check(e.name + "/identity-traced-gradient", anchors[0], [&] {
        return tensor_zero_status(identity_residuals(q).grad_laplacian, zt);
      });
      run.check(e.name + "/identity-scalar-gradient", anchors[1], [&] {
        return tensor_zero_status(identity_residuals(q).grad_scalar, zt);
      });
      run.check(e.name + "/identity-curvature-gradient", anchors[2], [&] {
        return tensor_zero_status(identity_residuals(q).curvature_grad, zt);
      });
      run.check(e.name + "/identity-weyl-cotton", anchors[3], [&] {
        return tensor_zero_status(identity_residuals(q).weyl_cotton, zt);
      });
    }

    CausalCharacter cc = causal_character(q, p, zt);
    if (q.mu() == Rational(-1, 2)) {
      run.check(e.name + "/mu-half-inapplicable",
                "harmonicity holds but structure theorems do not apply at mu = -1/2",
                [&] {
                  HarmonicityChecks hc = harmonicity_checks(g, f, zt);
                  TensorZeroResult r = hc.divw;
                  r = combine_zero(r, ZeroTester::Result{hc.w_gradf.status,
                                                         hc.w_gradf.max_abs, true});
                  return r;
                },
                true, "structure theorems inapplicable at mu = -1/2");
      continue;
    }
    if (cc == CausalCharacter::Null && g.dim() == 4) {
      SuiteFragment frag = isotropic_invariant_suite(q, p, zt);
      for (auto& [id, r] : frag) {
        TensorZeroResult rr = r;
        run.check(e.name + "/isotropic/" + id,
                  "null-gradient structure consequences", [&] { return rr; });
      }
      SuiteFragment par = parallel_distribution_check(g, f, zt);
      for (auto& [id, r] : par) {
        TensorZeroResult rr = r;
        run.check(e.name + "/parallel/" + id,
                  "span{grad f} parallel and the induced curvature vanishing",
                  [&] { return rr; });
      }
      run.check(e.name + "/hessian-gradient-contraction",
                "Hes_f(., grad f) = 0 for a null gradient", [&] {
                  TensorZeroResult r;
                  for (int i = 0; i < g.dim(); ++i) {
                    std::vector<Expr> terms;
                    for (int j = 0; j < g.dim(); ++j) {
                      terms.push_back(q.hessian().at(i, j) * q.grad().components()[j]);
                    }
                    r = combine_zero(r, zt.test(Expr::add(std::move(terms))));
                  }
                  return r;
                });
    } else if ((cc == CausalCharacter::Spacelike || cc == CausalCharacter::Timelike) &&
               g.dim() == 4) {
      SuiteFragment frag = nonisotropic_structure_checks(q, p, zt);
      for (auto& [id, r] : frag) {
        TensorZeroResult rr = r;
        run.check(e.name + "/frame/" + id,
                  "orthonormal-frame consequences for a non-null gradient",
                  [&] { return rr; });
      }
    }
  }

  // -- conformal transformation rules ---------------------------------------
  {
    struct Pair {
      std::string name;
      MetricField g;
      Expr f;
    };
    std::vector<Pair> pairs;
    {
      Chart ch{{"t", "x", "y", "z"}};
      std::vector<Expr> g(16, Expr());
      g[0] = Expr::integer(-1);
      g[5] = g[10] = g[15] = Expr::integer(1);
      pairs.push_back({"minkowski-t", MetricField::from_components(ch, std::move(g)),
                       Expr::symbol("t")});
    }
    pairs.push_back({"ppwave-mixed-u", build_ppwave(x1 * x2), u});
    pairs.push_back({"planewave-u", build_ppwave(x1 * x1 + x2 * x2), u});
    for (const auto& pr : pairs) {
      run.check("conformal/ricci-rule/" + pr.name,
                "Ricci of e^{-f} g via Hes_f, df(x)df and Lap f - |grad f|^2",
                [&] { return tensor_zero_status(conformal_ricci_residual(pr.g, pr.f), zt); });
      run.check("conformal/divw-rule/" + pr.name,
                "div W of e^{-f} g equals div W - W(.,.,.,grad f)/2",
                [&] { return tensor_zero_status(conformal_divweyl_residual(pr.g, pr.f), zt); });
    }
  }

  // -- randomized closed-form cross-check -----------------------------------
  {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 10; ++i) {
      Expr H = random_polynomial_profile(rng);
      run.check("random-ppwave/closed-form-match-" + std::to_string(i),
                "brute-force W and div W agree with the closed forms",
                [&] { return compare_ppwave_closed_forms(H, zt); });
    }
  }

  // -- solvability equivalence over the wave-profile corpus -----------------
  for (const auto& e : corpus) {
    if (!e.doc.is_ppwave()) continue;
    PPWaveSpec spec = PPWaveSpec::make(e.doc.resolve(*e.doc.ppwave_H));
    bool iii = is_zeroish(harmonic_weyl_condition(spec, zt));
    MetricField g = build_ppwave(spec);
    Curvature curv = compute_curvature(g);
    bool ii = is_zeroish(
        tensor_zero_status(div_weyl(g, weyl(g, curv), curv.gamma), zt).status);
    bool i_pass = false;
    double worst_q11 = -1;
    if (iii) {
      PotentialODEProblem prob;
      prob.phi = transverse_laplacian(spec.H).substitute(
          {{"x1", Expr()}, {"x2", Expr()}});
      prob.mu = e.doc.mu ? *e.doc.mu : Rational(0);
      auto sol = solve_potential_ode(prob);
      worst_q11 = certify_trajectory(prob.phi, prob.mu, sol);
      i_pass = !sol.blew_up && worst_q11 < 1e-6;
    }
    std::ostringstream detail;
    detail << "(i)=" << (i_pass ? "pass" : "fail") << " (ii)=" << (ii ? "pass" : "fail")
           << " (iii)=" << (iii ? "pass" : "fail");
    if (worst_q11 >= 0) detail << " max|Q11|=" << worst_q11;
    run.check(e.name + "/solvability-equivalence",
              "potential exists <=> div W = 0 <=> transverse Laplacian of u alone",
              [&] {
                TensorZeroResult r;
                r.status = (i_pass == ii && ii == iii) ? ZeroStatus::Zero
                                                       : ZeroStatus::NonZero;
                return r;
              },
              true, detail.str());
    if (i_pass) {
      run.check(e.name + "/weyl-gradient-vanishes",
                "W(.,.,.,grad f) = 0 whenever a potential exists", [&] {
                  std::vector<Expr> dv(4, Expr());
                  dv[1] = Expr::integer(1);  // grad of any f(u) spans this
                  return tensor_zero_status(contract_last(weyl(g, curv), dv), zt);
                });
      run.check(e.name + "/mu-half-solvable",
                "conformally-Einstein route places no restriction on mu", [&] {
                  PotentialODEProblem prob;
                  prob.phi = transverse_laplacian(spec.H).substitute(
                      {{"x1", Expr()}, {"x2", Expr()}});
                  prob.mu = Rational(-1, 2);
                  auto sol = solve_potential_ode(prob);
                  TensorZeroResult r;
                  double w = certify_trajectory(prob.phi, prob.mu, sol);
                  r.status = (!sol.blew_up && w < 1e-6) ? ZeroStatus::ProbablyZero
                                                        : ZeroStatus::NonZero;
                  r.max_abs = w;
                  r.exact = false;
                  return r;
                });
    }
  }

  // -- divergence-formula adjudication --------------------------------------
  {
    MetricField g = build_ppwave(Expr::pow(x1, 3) + u * Expr::pow(x2, 4));
    Curvature curv = compute_curvature(g);
    TensorField dW = div_weyl(g, weyl(g, curv), curv.gamma);
    TensorField drho = covariant_derivative(g, curv.ricci, curv.gamma);
    const auto& coords = g.chart().coords;
    auto reading = [&](bool bracketed) {
      TensorZeroResult r;
      const Expr half = Expr::number(Rational(1, 2));
      const Expr twelfth = Expr::number(Rational(1, 12));
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          for (int k = 0; k < 4; ++k) {
            Expr taupart = twelfth * (curv.tau.diff(coords[i]) * g.g(j, k) -
                                      curv.tau.diff(coords[j]) * g.g(i, k));
            Expr rhs = bracketed
                           ? -half * (drho.at(i, j, k) - drho.at(j, i, k)) + taupart
                           : -half * drho.at(i, j, k) - drho.at(j, i, k) + taupart;
            r = combine_zero(r, zt.test(dW.at(i, j, k) - rhs));
          }
        }
      }
      return r;
    };
    run.check("divw-formula/bracketed-reading",
              "div W = -1/2 {nabla rho antisymmetrized} + d tau terms",
              [&] { return reading(true); });
    run.check("divw-formula/as-printed",
              "unbracketed reading of the same display (adjudicated: typo)",
              [&] { return reading(false); }, false,
              "the -1/2 must distribute over both nabla-rho terms");
  }

  // -- negative controls -----------------------------------------------------
  run.check("control/nonharmonic-divw-nonzero",
            "cubic profile has div W(du,dx1,du) = -3/2", [&] {
              PPWaveSpec spec = PPWaveSpec::make(Expr::pow(x1, 3));
              MetricField g = build_ppwave(spec);
              Curvature curv = compute_curvature(g);
              return tensor_zero_status(div_weyl(g, weyl(g, curv), curv.gamma), zt);
            },
            false);
  run.check("control/nonharmonic-profile-condition",
            "quartic profile fails the function-of-u condition", [&] {
              TensorZeroResult r;
              r.status = harmonic_weyl_condition(
                  PPWaveSpec::make(Expr::pow(x1, 4)), zt);
              return r;
            },
            false);

  return rep;
}

}  // namespace qe
