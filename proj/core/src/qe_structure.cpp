#include "qe/qe_structure.hpp"

#include <cmath>

namespace qe {

const char* causal_character_name(CausalCharacter c) {
  switch (c) {
    case CausalCharacter::Spacelike: return "Spacelike";
    case CausalCharacter::Timelike: return "Timelike";
    case CausalCharacter::Null: return "Null";
    case CausalCharacter::ZeroVector: return "ZeroVector";
  }
  return "?";
}

Expr lambda_from_trace(const MetricField& g, const Expr& f, const Rational& mu) {
  Curvature curv = compute_curvature(g);
  Expr lap = laplacian(g, f, curv.gamma);
  Expr gns = grad_norm_sq(g, f);
  return (lap + curv.tau - Expr::number(mu) * gns) / Expr::integer(g.dim());
}

QEStructure::QEStructure(MetricField g, Expr f, Rational mu, const ZeroTester& zt)
    : g_(std::move(g)),
      f_(std::move(f)),
      mu_(std::move(mu)),
      curv_(compute_curvature(g_)),
      grad_(gradient(g_, f_)),
      hes_(qe::hessian(g_, f_, curv_.gamma)),
      q_(g_.chart(), 2, 0, Symmetry::SymmetricPair) {
  const int n = g_.dim();
  const auto& coords = g_.chart().coords;
  df_.resize(n);
  for (int i = 0; i < n; ++i) df_[i] = f_.diff(coords[i]);
  lap_ = qe::laplacian(g_, f_, curv_.gamma);
  gns_ = qe::grad_norm_sq(g_, f_);
  lambda_ = (lap_ + curv_.tau - Expr::number(mu_) * gns_) / Expr::integer(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      q_.at(i, j) = hes_.at(i, j) + curv_.ricci.at(i, j) -
                    Expr::number(mu_) * df_[i] * df_[j] - lambda_ * g_.g(i, j);
    }
  }
  q_status_ = tensor_zero_status(q_, zt);
}

TensorField QEStructure::bakry_emery_ricci() const {
  const int n = g_.dim();
  TensorField out(g_.chart(), 2, 0, Symmetry::SymmetricPair);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.at(i, j) = curv_.ricci.at(i, j) + hes_.at(i, j) -
                     Expr::number(mu_) * df_[i] * df_[j];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

IdentityResiduals identity_residuals(const QEStructure& q) {
  if (!q.is_qe()) {
    throw RefusedError(
        "identity residuals presuppose a quasi-Einstein structure; Q(f) is " +
        std::string(zero_status_name(q.qe_status().status)));
  }
  const MetricField& g = q.metric();
  const int n = g.dim();
  if (n != 4) throw DimensionError("identity residuals are the dimension-4 instances");
  const auto& coords = g.chart().coords;
  const Curvature& curv = q.curvature();
  const Expr mu = Expr::number(q.mu());
  const Expr& lam = q.lambda();

  // rho(grad f)_i and Hes(grad f)_i as lower-index 1-forms
  std::vector<Expr> ric_grad(n), hes_grad(n), dlam(n), dtau(n), dlap(n);
  for (int i = 0; i < n; ++i) {
    std::vector<Expr> rg, hg;
    for (int j = 0; j < n; ++j) {
      rg.push_back(curv.ricci.at(i, j) * q.grad().components()[j]);
      hg.push_back(q.hessian().at(i, j) * q.grad().components()[j]);
    }
    ric_grad[i] = Expr::add(std::move(rg));
    hes_grad[i] = Expr::add(std::move(hg));
    dlam[i] = lam.diff(coords[i]);
    dtau[i] = curv.tau.diff(coords[i]);
    dlap[i] = q.laplacian().diff(coords[i]);
  }

  TensorField eq5(g.chart(), 1, 0), eq6(g.chart(), 1, 0);
  const Expr two = Expr::integer(2);
  for (int i = 0; i < n; ++i) {
    eq5.components()[i] =
        two * dlap[i] + two * ric_grad[i] + dtau[i] -
        two * mu * (hes_grad[i] + q.laplacian() * q.df(i)) - two * dlam[i];
    eq6.components()[i] = dtau[i] +
                          two * mu * (Expr::integer(3) * lam - curv.tau) * q.df(i) +
                          two * (mu - Expr::integer(1)) * ric_grad[i] -
                          Expr::integer(6) * dlam[i];
  }

  TensorField r_grad = contract_last(curv.riemann, q.grad().components());
  TensorField drho = covariant_derivative(g, curv.ricci, curv.gamma);
  TensorField eq7(g.chart(), 3, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        Expr rhs = dlam[i] * g.g(j, k) - dlam[j] * g.g(i, k) +
                   drho.at(j, i, k) - drho.at(i, j, k) +
                   mu * (q.df(j) * q.hessian().at(i, k) -
                         q.df(i) * q.hessian().at(j, k));
        eq7.at(i, j, k) = r_grad.at(i, j, k) - rhs;
      }
    }
  }

  TensorField W = weyl(g, curv);
  TensorField divW = div_weyl(g, W, curv.gamma);
  TensorField w_grad = contract_last(W, q.grad().components());
  Expr c = two * mu + Expr::integer(1);
  Expr c6 = c / Expr::integer(6), c2 = c / two;
  TensorField eq8(g.chart(), 3, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        Expr rhs = two * divW.at(i, j, k) +
                   curv.tau * c6 * (q.df(j) * g.g(i, k) - q.df(i) * g.g(j, k)) +
                   c6 * (ric_grad[i] * g.g(j, k) - ric_grad[j] * g.g(i, k)) +
                   c2 * (curv.ricci.at(j, k) * q.df(i) -
                         curv.ricci.at(i, k) * q.df(j));
        eq8.at(i, j, k) = w_grad.at(i, j, k) - rhs;
      }
    }
  }
  return IdentityResiduals{std::move(eq5), std::move(eq6), std::move(eq7),
                           std::move(eq8)};
}

HarmonicityChecks harmonicity_checks(const MetricField& g, const Expr& f,
                                     const ZeroTester& zt) {
  Curvature curv = compute_curvature(g);
  TensorField W = weyl(g, curv);
  TensorField divW = div_weyl(g, W, curv.gamma);
  TensorField grad = gradient(g, f);
  TensorField wg = contract_last(W, grad.components());
  return HarmonicityChecks{tensor_zero_status(divW, zt),
                           tensor_zero_status(wg, zt)};
}

CausalCharacter causal_character(const QEStructure& q, const NumericPoint& p,
                                 const ZeroTester& zt) {
  constexpr double kTol = 1e-9;
  double grad_mag = 0;
  for (const auto& c : q.grad().components()) {
    grad_mag = std::max(grad_mag, std::abs(c.eval(p)));
  }
  if (is_zeroish(zt.status(q.grad_norm_sq()))) {
    return grad_mag > kTol ? CausalCharacter::Null : CausalCharacter::ZeroVector;
  }
  double v = q.grad_norm_sq().eval(p);
  if (v > kTol) return CausalCharacter::Spacelike;
  if (v < -kTol) return CausalCharacter::Timelike;
  return grad_mag > kTol ? CausalCharacter::Null : CausalCharacter::ZeroVector;
}

// ---------------------------------------------------------------------------

static TensorZeroResult scalar_result(const Expr& e, const ZeroTester& zt) {
  return combine_zero(TensorZeroResult{}, zt.test(e));
}

SuiteFragment isotropic_invariant_suite(const QEStructure& q, const NumericPoint& p,
                                        const ZeroTester& zt) {
  if (!q.is_qe()) throw RefusedError("not a quasi-Einstein structure");
  if (causal_character(q, p, zt) != CausalCharacter::Null) {
    throw RefusedError("gradient of the potential is not null at the sample point");
  }
  HarmonicityChecks hc = harmonicity_checks(q.metric(), q.f(), zt);
  if (!is_zeroish(hc.divw.status)) throw RefusedError("div W does not vanish");
  if (!is_zeroish(hc.w_gradf.status)) {
    throw RefusedError("W(.,.,.,grad f) does not vanish");
  }

  const MetricField& g = q.metric();
  const int n = g.dim();
  const auto& coords = g.chart().coords;
  const Curvature& curv = q.curvature();
  const Expr& lam = q.lambda();
  SuiteFragment out;

  TensorField ric_eigen(g.chart(), 1, 0);
  for (int i = 0; i < n; ++i) {
    std::vector<Expr> terms;
    for (int j = 0; j < n; ++j) {
      terms.push_back(curv.ricci.at(i, j) * q.grad().components()[j]);
    }
    ric_eigen.components()[i] = Expr::add(std::move(terms)) - lam * q.df(i);
  }
  out.emplace_back("ricci-gradient-eigenvector", tensor_zero_status(ric_eigen, zt));
  out.emplace_back("trace-relation", scalar_result(curv.tau - Expr::integer(4) * lam, zt));
  out.emplace_back("laplacian-vanishes", scalar_result(q.laplacian(), zt));
  TensorField dlam(g.chart(), 1, 0);
  for (int i = 0; i < n; ++i) {
    dlam.components()[i] = lam.diff(coords[i]) + lam * q.df(i);
  }
  out.emplace_back("lambda-gradient", tensor_zero_status(dlam, zt));
  out.emplace_back("lambda-vanishes", scalar_result(lam, zt));

  // rank <= 1 with null image: all 2x2 minors of rho vanish and the
  // squared Ricci operator vanishes (image is null and in its kernel)
  TensorZeroResult rank{};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = i; k < n; ++k) {
        for (int l = j; l < n; ++l) {
          Expr minor = curv.ricci.at(i, j) * curv.ricci.at(k, l) -
                       curv.ricci.at(i, l) * curv.ricci.at(k, j);
          rank = combine_zero(rank, zt.test(minor));
        }
      }
    }
  }
  TensorField op = raise_index(g, curv.ricci, 0);  // rho^i_j
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<Expr> terms;
      for (int k = 0; k < n; ++k) terms.push_back(op.at(i, k) * op.at(k, j));
      rank = combine_zero(rank, zt.test(Expr::add(std::move(terms))));
    }
  }
  out.emplace_back("ricci-rank-one-null", rank);
  return out;
}

// Basis of the complement {Y : df(Y) = 0} built against the pivot
// coordinate j0, the first one whose df-component is nonzero.
static std::vector<std::vector<Expr>> complement_basis(const MetricField& g,
                                                       const std::vector<Expr>& df,
                                                       const ZeroTester& zt) {
  const int n = g.dim();
  int j0 = -1;
  for (int j = 0; j < n; ++j) {
    if (!is_zeroish(zt.status(df[j]))) {
      j0 = j;
      break;
    }
  }
  if (j0 < 0) {
    throw DegenerateInputError("gradient of the potential vanishes identically");
  }
  std::vector<std::vector<Expr>> ys;
  for (int m = 0; m < n; ++m) {
    if (m == j0) continue;
    std::vector<Expr> y(n, Expr());
    y[m] = Expr::integer(1);
    y[j0] = -(df[m] / df[j0]);
    ys.push_back(std::move(y));
  }
  return ys;
}

static Expr contract_riemann(const TensorField& riem, const std::vector<Expr>& X,
                             const std::vector<Expr>& Y, int k, int l) {
  const int n = riem.dim();
  std::vector<Expr> terms;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      terms.push_back(riem.at(i, j, k, l) * X[i] * Y[j]);
    }
  }
  return Expr::add(std::move(terms));
}

SuiteFragment parallel_distribution_check(const MetricField& g, const Expr& f,
                                          const ZeroTester& zt) {
  const int n = g.dim();
  const auto& coords = g.chart().coords;
  Curvature curv = compute_curvature(g);
  TensorField grad = gradient(g, f);
  const std::vector<Expr>& G = grad.components();
  std::vector<Expr> df(n);
  for (int i = 0; i < n; ++i) df[i] = f.diff(coords[i]);

  // (nabla_a G)^i = d_a G^i + Gamma^i_ak G^k
  std::vector<std::vector<Expr>> dG(n, std::vector<Expr>(n));
  for (int a = 0; a < n; ++a) {
    for (int i = 0; i < n; ++i) {
      std::vector<Expr> terms{G[i].diff(coords[a])};
      for (int k = 0; k < n; ++k) terms.push_back(curv.gamma.at(i, a, k) * G[k]);
      dG[a][i] = Expr::add(std::move(terms));
    }
  }
  SuiteFragment out;
  TensorZeroResult prop{};
  for (int a = 0; a < n; ++a) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        prop = combine_zero(prop, zt.test(dG[a][i] * G[j] - dG[a][j] * G[i]));
      }
    }
  }
  out.emplace_back("gradient-span-parallel", prop);

  std::vector<std::vector<Expr>> ys = complement_basis(g, df, zt);
  TensorZeroResult r_d_dperp{}, r_dperp_d{}, r_dperp{};
  for (size_t m = 0; m < ys.size(); ++m) {
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        r_d_dperp = combine_zero(r_d_dperp,
                                 zt.test(contract_riemann(curv.riemann, G, ys[m], k, l)));
      }
    }
    for (size_t m2 = m + 1; m2 < ys.size(); ++m2) {
      Expr base[4];
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          Expr v = contract_riemann(curv.riemann, ys[m], ys[m2], k, l);
          r_dperp = combine_zero(r_dperp, zt.test(v));
        }
      }
      for (int l = 0; l < n; ++l) {
        std::vector<Expr> terms;
        for (int k = 0; k < n; ++k) {
          terms.push_back(contract_riemann(curv.riemann, ys[m], ys[m2], k, l) * G[k]);
        }
        r_dperp_d = combine_zero(r_dperp_d, zt.test(Expr::add(std::move(terms))));
      }
    }
  }
  out.emplace_back("curvature-d-dperp", r_d_dperp);
  out.emplace_back("curvature-dperp-dperp-d", r_dperp_d);
  out.emplace_back("curvature-dperp-dperp", r_dperp);
  return out;
}

SuiteFragment nonisotropic_structure_checks(const QEStructure& q,
                                            const NumericPoint& p,
                                            const ZeroTester& zt) {
  if (!q.is_qe()) throw RefusedError("not a quasi-Einstein structure");
  CausalCharacter cc = causal_character(q, p, zt);
  if (cc != CausalCharacter::Spacelike && cc != CausalCharacter::Timelike) {
    throw RefusedError("gradient of the potential is not spacelike or timelike");
  }
  if (q.mu() == Rational(-1, 2)) {
    throw RefusedError("structure theorems are inapplicable at mu = -1/2");
  }
  HarmonicityChecks hc = harmonicity_checks(q.metric(), q.f(), zt);
  if (!is_zeroish(hc.divw.status)) throw RefusedError("div W does not vanish");
  if (!is_zeroish(hc.w_gradf.status)) {
    throw RefusedError("W(.,.,.,grad f) does not vanish");
  }

  const MetricField& g = q.metric();
  const int n = g.dim();
  const Curvature& curv = q.curvature();
  auto inner = [&](const std::vector<Expr>& X, const std::vector<Expr>& Y) {
    std::vector<Expr> terms;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) terms.push_back(g.g(i, j) * X[i] * Y[j]);
    }
    return Expr::add(std::move(terms));
  };

  // E1 = grad f / |grad f|; the remaining frame vectors come from
  // Gram-Schmidt over the coordinate basis in chart order, dropping
  // directions that degenerate (numeric norm test at the sample point).
  std::vector<std::vector<Expr>> frame;
  std::vector<int> eps;
  Expr gns = q.grad_norm_sq();
  Expr norm1 = Expr::sqrt(cc == CausalCharacter::Timelike ? -gns : gns);
  std::vector<Expr> e1 = q.grad().components();
  for (auto& c : e1) c = c / norm1;
  frame.push_back(e1);
  eps.push_back(cc == CausalCharacter::Timelike ? -1 : 1);
  for (int a = 0; a < n && static_cast<int>(frame.size()) < n; ++a) {
    std::vector<Expr> v(n, Expr());
    v[a] = Expr::integer(1);
    for (size_t k = 0; k < frame.size(); ++k) {
      Expr proj = inner(v, frame[k]) * Expr::integer(eps[k]);
      for (int i = 0; i < n; ++i) v[i] = v[i] - proj * frame[k][i];
    }
    Expr vv = inner(v, v);
    double vv_num = 0;
    try {
      vv_num = vv.eval(p);
    } catch (const EvalError&) {
      continue;
    }
    if (std::abs(vv_num) < 1e-9) continue;  // degenerate direction
    int sign = vv_num < 0 ? -1 : 1;
    Expr norm = Expr::sqrt(sign < 0 ? -vv : vv);
    for (auto& c : v) c = c / norm;
    frame.push_back(std::move(v));
    eps.push_back(sign);
  }
  if (static_cast<int>(frame.size()) != n) {
    throw DegenerateInputError("could not complete an orthonormal frame");
  }

  auto eval2 = [&](const TensorField& T, const std::vector<Expr>& X,
                   const std::vector<Expr>& Y) {
    std::vector<Expr> terms;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) terms.push_back(T.at(i, j) * X[i] * Y[j]);
    }
    return Expr::add(std::move(terms));
  };

  SuiteFragment out;
  TensorZeroResult diag{};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      diag = combine_zero(diag, zt.test(eval2(curv.ricci, frame[i], frame[j])));
    }
  }
  out.emplace_back("ricci-diagonal-in-frame", diag);

  // umbilicity of the level hypersurfaces: on {E2,...,En} the Hessian is
  // proportional to the induced metric
  TensorZeroResult umb{};
  std::vector<Expr> hdiag(n);
  for (int i = 1; i < n; ++i) {
    hdiag[i] = eval2(q.hessian(), frame[i], frame[i]);
    for (int j = i + 1; j < n; ++j) {
      umb = combine_zero(umb, zt.test(eval2(q.hessian(), frame[i], frame[j])));
    }
  }
  for (int i = 1; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      umb = combine_zero(umb, zt.test(hdiag[i] * Expr::integer(eps[i]) -
                                      hdiag[j] * Expr::integer(eps[j])));
    }
  }
  out.emplace_back("level-hypersurface-umbilicity", umb);

  // the algebraic relation behind both: for div W = 0, W(.,grad f,.,grad f)=0
  // and mu != -1/2,
  //   0 = tau{df(X)df(Z) - |grad f|^2 g(X,Z)}
  //     + 3{rho(X,Z)|grad f|^2 - rho(grad f,Z)df(X)}
  //     + g(X,Z) rho(grad f,grad f) - df(Z) rho(X,grad f)
  std::vector<Expr> ric_grad(n);
  for (int i = 0; i < n; ++i) {
    std::vector<Expr> terms;
    for (int j = 0; j < n; ++j) {
      terms.push_back(curv.ricci.at(i, j) * q.grad().components()[j]);
    }
    ric_grad[i] = Expr::add(std::move(terms));
  }
  std::vector<Expr> rgg_terms;
  for (int i = 0; i < n; ++i) rgg_terms.push_back(ric_grad[i] * q.grad().components()[i]);
  Expr rho_gg = Expr::add(std::move(rgg_terms));
  TensorZeroResult alg{};
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      Expr v = curv.tau * (q.df(i) * q.df(k) - gns * g.g(i, k)) +
               Expr::integer(3) * (curv.ricci.at(i, k) * gns - ric_grad[k] * q.df(i)) +
               g.g(i, k) * rho_gg - q.df(k) * ric_grad[i];
      alg = combine_zero(alg, zt.test(v));
    }
  }
  out.emplace_back("curvature-frame-relation", alg);
  return out;
}

}  // namespace qe
