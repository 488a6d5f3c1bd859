#include "qe/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace qe {

TensorField::TensorField(Chart chart, int lower, int upper, Symmetry sym)
    : chart_(std::move(chart)), lower_(lower), upper_(upper), sym_(sym) {
  size_t n = 1;
  for (int i = 0; i < lower_ + upper_; ++i) n *= chart_.dim();
  c_.assign(n, Expr());
}

size_t TensorField::flat(const std::vector<int>& idx) const {
  size_t f = 0;
  for (int i : idx) f = f * dim() + i;
  return f;
}

TensorField TensorField::operator-(const TensorField& other) const {
  TensorField out(chart_, lower_, upper_, Symmetry::None);
  for (size_t i = 0; i < c_.size(); ++i) out.c_[i] = c_[i] - other.c_[i];
  return out;
}

TensorField TensorField::operator+(const TensorField& other) const {
  TensorField out(chart_, lower_, upper_, Symmetry::None);
  for (size_t i = 0; i < c_.size(); ++i) out.c_[i] = c_[i] + other.c_[i];
  return out;
}

// ---------------------------------------------------------------------------
// metric

static Expr matrix_det(const std::vector<Expr>& m, std::vector<int> rows,
                       std::vector<int> cols, int n) {
  if (rows.size() == 1) return m[rows[0] * n + cols[0]];
  std::vector<Expr> terms;
  int sign = 1;
  for (size_t c = 0; c < cols.size(); ++c) {
    std::vector<int> sub_rows(rows.begin() + 1, rows.end());
    std::vector<int> sub_cols;
    for (size_t cc = 0; cc < cols.size(); ++cc) {
      if (cc != c) sub_cols.push_back(cols[cc]);
    }
    Expr minor = matrix_det(m, sub_rows, sub_cols, n);
    terms.push_back(Expr::integer(sign) * m[rows[0] * n + cols[c]] * minor);
    sign = -sign;
  }
  return Expr::add(std::move(terms));
}

MetricField MetricField::from_components(Chart chart, std::vector<Expr> g) {
  const int n = chart.dim();
  if (g.size() != static_cast<size_t>(n) * n) {
    throw DimensionError("metric component count does not match chart dimension");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!(g[i * n + j] - g[j * n + i]).is_zero_literal()) {
        throw DimensionError("metric components are not symmetric");
      }
    }
  }
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  Expr det = matrix_det(g, all, all, n);
  {
    ZeroTester zt;
    if (is_zeroish(zt.status(det))) {
      throw SingularMetricError("metric determinant is identically zero");
    }
  }
  Expr det_inv;
  try {
    det_inv = Expr::pow(det, Rational(-1));
  } catch (const ExprError&) {
    throw SingularMetricError("metric determinant is identically zero");
  }
  std::vector<Expr> ginv(static_cast<size_t>(n) * n, Expr());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // inverse = adjugate/det; entry (i,j) uses the cofactor at (j,i),
      // which for symmetric g equals the one at (i,j)
      std::vector<int> rows, cols;
      for (int r = 0; r < n; ++r) {
        if (r != j) rows.push_back(r);
      }
      for (int c = 0; c < n; ++c) {
        if (c != i) cols.push_back(c);
      }
      Expr cof = (n == 1) ? Expr::integer(1) : matrix_det(g, rows, cols, n);
      int sign = ((i + j) % 2 == 0) ? 1 : -1;
      ginv[i * n + j] = Expr::integer(sign) * cof * det_inv;
    }
  }
  MetricField mf(std::move(chart), std::move(g), std::move(ginv), std::move(det));
  // sanity: g * g^{-1} must normalize to the identity
  ZeroTester zt;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Expr entry;
      for (int k = 0; k < n; ++k) entry = entry + mf.g(i, k) * mf.inv(k, j);
      if (i == j) entry = entry - Expr::integer(1);
      if (!is_zeroish(zt.status(entry))) {
        throw SingularMetricError("metric inverse residual is nonzero");
      }
    }
  }
  return mf;
}

MetricField MetricField::from_document(const MetricDocument& doc) {
  if (doc.is_ppwave()) {
    throw DimensionError("pp-wave documents build their metric via build_ppwave");
  }
  const int n = doc.chart.dim();
  std::vector<Expr> g(static_cast<size_t>(n) * n, Expr());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g[i * n + j] = doc.resolve((*doc.metric)[i * n + j]);
  }
  return from_components(doc.chart, std::move(g));
}

TensorField MetricField::lower_tensor() const {
  TensorField t(chart_, 2, 0, Symmetry::SymmetricPair);
  t.components() = g_;
  return t;
}

std::vector<int> MetricField::signature_at(const NumericPoint& p) const {
  const int n = dim();
  std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i * n + j] = g(i, j).eval(p);
  }
  // cyclic Jacobi on the small symmetric matrix
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
    }
    if (off < 1e-24) break;
    for (int pq = 0; pq < n; ++pq) {
      for (int q = pq + 1; q < n; ++q) {
        double apq = a[pq * n + q];
        if (std::abs(apq) < 1e-18) continue;
        double app = a[pq * n + pq], aqq = a[q * n + q];
        double theta = 0.5 * std::atan2(2 * apq, aqq - app);
        double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < n; ++k) {
          double akp = a[k * n + pq], akq = a[k * n + q];
          a[k * n + pq] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a[pq * n + k], aqk = a[q * n + k];
          a[pq * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<int> signs;
  for (int i = 0; i < n; ++i) signs.push_back(a[i * n + i] < 0 ? -1 : 1);
  std::sort(signs.begin(), signs.end());
  return signs;
}

// ---------------------------------------------------------------------------
// curvature

TensorField christoffel(const MetricField& g) {
  const int n = g.dim();
  const auto& coords = g.chart().coords;
  // dg[l][i][j] = d_l g_ij
  std::vector<Expr> dg(static_cast<size_t>(n) * n * n);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        dg[(l * n + i) * n + j] = g.g(i, j).diff(coords[l]);
      }
    }
  }
  TensorField gamma(g.chart(), 2, 1);  // stored [k][i][j]
  const Rational half(1, 2);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        std::vector<Expr> terms;
        for (int l = 0; l < n; ++l) {
          Expr s = dg[(i * n + j) * n + l] + dg[(j * n + i) * n + l] -
                   dg[(l * n + i) * n + j];
          terms.push_back(g.inv(k, l) * s);
        }
        Expr val = Expr::number(half) * Expr::add(std::move(terms));
        gamma.at(k, i, j) = val;
        gamma.at(k, j, i) = val;
      }
    }
  }
  return gamma;
}

static TensorField riemann_from_gamma(const MetricField& g, const TensorField& gamma) {
  const int n = g.dim();
  const auto& coords = g.chart().coords;
  // Rstd^m_ijk = d_i G^m_jk - d_j G^m_ik + G^m_in G^n_jk - G^m_jn G^n_ik
  TensorField riem(g.chart(), 4, 0, Symmetry::RiemannType);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
          std::vector<Expr> ts;
          ts.push_back(gamma.at(m, j, k).diff(coords[i]));
          ts.push_back(-gamma.at(m, i, k).diff(coords[j]));
          for (int nn = 0; nn < n; ++nn) {
            ts.push_back(gamma.at(m, i, nn) * gamma.at(nn, j, k));
            ts.push_back(-(gamma.at(m, j, nn) * gamma.at(nn, i, k)));
          }
          Expr r_upper = Expr::add(std::move(ts));
          // engine convention: R_ijkl = - g_lm Rstd^m_ijk
          for (int l = 0; l < n; ++l) {
            riem.at(i, j, k, l) = riem.at(i, j, k, l) - g.g(l, m) * r_upper;
          }
        }
      }
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          riem.at(j, i, k, l) = -riem.at(i, j, k, l);
        }
      }
    }
  }
  return riem;
}

TensorField riemann(const MetricField& g) {
  return riemann_from_gamma(g, christoffel(g));
}

TensorField ricci(const MetricField& g, const TensorField& riem) {
  const int n = g.dim();
  TensorField rho(g.chart(), 2, 0, Symmetry::SymmetricPair);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      std::vector<Expr> terms;
      for (int i = 0; i < n; ++i) {
        for (int l = 0; l < n; ++l) {
          terms.push_back(g.inv(i, l) * riem.at(i, j, l, k));
        }
      }
      Expr val = Expr::add(std::move(terms));
      rho.at(j, k) = val;
      rho.at(k, j) = val;
    }
  }
  return rho;
}

Expr scalar_curvature(const MetricField& g, const TensorField& ric) {
  const int n = g.dim();
  std::vector<Expr> terms;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) terms.push_back(g.inv(j, k) * ric.at(j, k));
  }
  return Expr::add(std::move(terms));
}

Curvature compute_curvature(const MetricField& g) {
  TensorField gamma = christoffel(g);
  TensorField riem = riemann_from_gamma(g, gamma);
  TensorField ric = ricci(g, riem);
  Expr tau = scalar_curvature(g, ric);
  return Curvature{std::move(gamma), std::move(riem), std::move(ric), std::move(tau)};
}

Expr sectional_curvature(const MetricField& g, const TensorField& riem,
                         const std::vector<Expr>& X, const std::vector<Expr>& Y) {
  const int n = g.dim();
  std::vector<Expr> rterms, gxx, gyy, gxy;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gxx.push_back(g.g(i, j) * X[i] * X[j]);
      gyy.push_back(g.g(i, j) * Y[i] * Y[j]);
      gxy.push_back(g.g(i, j) * X[i] * Y[j]);
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          rterms.push_back(riem.at(i, j, k, l) * X[i] * Y[j] * X[k] * Y[l]);
        }
      }
    }
  }
  Expr num = Expr::add(std::move(rterms));
  Expr den = Expr::add(std::move(gxx)) * Expr::add(std::move(gyy)) -
             Expr::pow(Expr::add(std::move(gxy)), 2);
  return num / den;
}

// ---------------------------------------------------------------------------
// scalar field machinery

TensorField hessian(const MetricField& g, const Expr& f, const TensorField& gamma) {
  const int n = g.dim();
  const auto& coords = g.chart().coords;
  std::vector<Expr> df(n);
  for (int i = 0; i < n; ++i) df[i] = f.diff(coords[i]);
  TensorField hes(g.chart(), 2, 0, Symmetry::SymmetricPair);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::vector<Expr> terms{df[j].diff(coords[i])};
      for (int k = 0; k < n; ++k) terms.push_back(-(gamma.at(k, i, j) * df[k]));
      Expr val = Expr::add(std::move(terms));
      hes.at(i, j) = val;
      hes.at(j, i) = val;
    }
  }
  return hes;
}

TensorField gradient(const MetricField& g, const Expr& f) {
  const int n = g.dim();
  const auto& coords = g.chart().coords;
  TensorField grad(g.chart(), 0, 1);
  for (int i = 0; i < n; ++i) {
    std::vector<Expr> terms;
    for (int j = 0; j < n; ++j) terms.push_back(g.inv(i, j) * f.diff(coords[j]));
    grad.components()[i] = Expr::add(std::move(terms));
  }
  return grad;
}

Expr laplacian(const MetricField& g, const Expr& f, const TensorField& gamma) {
  const int n = g.dim();
  TensorField hes = hessian(g, f, gamma);
  std::vector<Expr> terms;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) terms.push_back(g.inv(i, j) * hes.at(i, j));
  }
  return Expr::add(std::move(terms));
}

Expr grad_norm_sq(const MetricField& g, const Expr& f) {
  const int n = g.dim();
  const auto& coords = g.chart().coords;
  std::vector<Expr> terms;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      terms.push_back(g.inv(i, j) * f.diff(coords[i]) * f.diff(coords[j]));
    }
  }
  return Expr::add(std::move(terms));
}

// ---------------------------------------------------------------------------
// Weyl tensor and divergence

TensorField weyl(const MetricField& g, const Curvature& curv) {
  if (g.dim() != 4) throw DimensionError("Weyl tensor is implemented for dimension 4 only");
  const int n = 4;
  const Rational sixth(1, 6), half(1, 2);
  const TensorField& R = curv.riemann;
  const TensorField& rho = curv.ricci;
  TensorField W(g.chart(), 4, 0, Symmetry::RiemannType);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          Expr v = R.at(i, j, k, l) +
                   Expr::number(sixth) * curv.tau *
                       (g.g(i, k) * g.g(j, l) - g.g(i, l) * g.g(j, k)) +
                   Expr::number(half) *
                       (rho.at(i, l) * g.g(j, k) - rho.at(i, k) * g.g(j, l) +
                        rho.at(j, k) * g.g(i, l) - rho.at(j, l) * g.g(i, k));
          W.at(i, j, k, l) = v;
        }
      }
    }
  }
  return W;
}

TensorField covariant_derivative(const MetricField& g, const TensorField& T,
                                 const TensorField& gamma) {
  if (T.upper() != 0) {
    throw DimensionError("covariant_derivative expects an all-lower tensor");
  }
  const int n = g.dim();
  const int r = T.lower();
  const auto& coords = g.chart().coords;
  TensorField out(g.chart(), r + 1, 0);
  std::vector<int> idx(r, 0);
  const size_t total = T.size();
  for (size_t flat = 0; flat < total; ++flat) {
    size_t rem = flat;
    for (int s = r - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(rem % n);
      rem /= n;
    }
    for (int a = 0; a < n; ++a) {
      std::vector<Expr> terms{T.at(idx).diff(coords[a])};
      for (int s = 0; s < r; ++s) {
        std::vector<int> jdx = idx;
        for (int c = 0; c < n; ++c) {
          jdx[s] = c;
          terms.push_back(-(gamma.at(c, a, idx[s]) * T.at(jdx)));
        }
      }
      std::vector<int> odx;
      odx.reserve(r + 1);
      odx.push_back(a);
      odx.insert(odx.end(), idx.begin(), idx.end());
      out.at(odx) = Expr::add(std::move(terms));
    }
  }
  return out;
}

TensorField div_weyl(const MetricField& g, const TensorField& W,
                     const TensorField& gamma) {
  if (g.dim() != 4) throw DimensionError("div W is implemented for dimension 4 only");
  const int n = 4;
  TensorField cd = covariant_derivative(g, W, gamma);  // (nabla_a W)_ijkb
  TensorField out(g.chart(), 3, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        std::vector<Expr> terms;
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            terms.push_back(g.inv(a, b) * cd.at({a, i, j, k, b}));
          }
        }
        out.at(i, j, k) = Expr::add(std::move(terms));
      }
    }
  }
  return out;
}

TensorField divergence_sym2(const MetricField& g, const TensorField& T,
                            const TensorField& gamma) {
  const int n = g.dim();
  TensorField cd = covariant_derivative(g, T, gamma);  // (nabla_a T)_bk
  TensorField out(g.chart(), 1, 0);
  for (int k = 0; k < n; ++k) {
    std::vector<Expr> terms;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        terms.push_back(g.inv(a, b) * cd.at(a, b, k));
      }
    }
    out.components()[k] = Expr::add(std::move(terms));
  }
  return out;
}

TensorField contract_last(const TensorField& T, const std::vector<Expr>& vec) {
  const int n = T.dim();
  const int r = T.lower();
  TensorField out(T.chart(), r - 1, T.upper());
  const size_t outer = T.size() / n;
  for (size_t o = 0; o < outer; ++o) {
    std::vector<Expr> terms;
    for (int m = 0; m < n; ++m) {
      terms.push_back(T.components()[o * n + m] * vec[m]);
    }
    out.components()[o] = Expr::add(std::move(terms));
  }
  return out;
}

static TensorField metric_contract_slot(const MetricField& g, const TensorField& T,
                                        int slot, bool raise) {
  const int n = g.dim();
  const int r = T.rank();
  TensorField out(T.chart(), raise ? T.lower() - 1 : T.lower() + 1,
                  raise ? T.upper() + 1 : T.upper() - 1);
  std::vector<int> idx(r, 0);
  for (size_t flat = 0; flat < T.size(); ++flat) {
    size_t rem = flat;
    for (int s = r - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(rem % n);
      rem /= n;
    }
    std::vector<Expr> terms;
    std::vector<int> jdx = idx;
    for (int c = 0; c < n; ++c) {
      jdx[slot] = c;
      const Expr& m = raise ? g.inv(idx[slot], c) : g.g(idx[slot], c);
      terms.push_back(m * T.at(jdx));
    }
    out.components()[flat] = Expr::add(std::move(terms));
  }
  return out;
}

TensorField raise_index(const MetricField& g, const TensorField& T, int slot) {
  return metric_contract_slot(g, T, slot, true);
}

TensorField lower_index(const MetricField& g, const TensorField& T, int slot) {
  return metric_contract_slot(g, T, slot, false);
}

// ---------------------------------------------------------------------------
// conformal rules

MetricField conformal_metric(const MetricField& g, const Expr& f) {
  const int n = g.dim();
  Expr factor = Expr::call(Fn::Exp, -f);
  std::vector<Expr> comps(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) comps[i * n + j] = factor * g.g(i, j);
  }
  return MetricField::from_components(g.chart(), std::move(comps));
}

TensorField conformal_ricci_residual(const MetricField& g, const Expr& f) {
  if (g.dim() != 4) throw DimensionError("conformal Ricci rule is the dimension-4 instance");
  const int n = 4;
  const auto& coords = g.chart().coords;
  MetricField gt = conformal_metric(g, f);
  TensorField rho_t = ricci(gt, riemann(gt));

  Curvature curv = compute_curvature(g);
  TensorField hes = hessian(g, f, curv.gamma);
  Expr lap = laplacian(g, f, curv.gamma);
  Expr gns = grad_norm_sq(g, f);
  const Rational half(1, 2);
  TensorField out(g.chart(), 2, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Expr rhs = curv.ricci.at(i, j) + hes.at(i, j) +
                 Expr::number(half) * f.diff(coords[i]) * f.diff(coords[j]) +
                 Expr::number(half) * (lap - gns) * g.g(i, j);
      out.at(i, j) = rho_t.at(i, j) - rhs;
    }
  }
  return out;
}

TensorField conformal_divweyl_residual(const MetricField& g, const Expr& f) {
  if (g.dim() != 4) throw DimensionError("conformal div W rule is the dimension-4 instance");
  const int n = 4;
  MetricField gt = conformal_metric(g, f);
  Curvature curv_t = compute_curvature(gt);
  TensorField divw_t = div_weyl(gt, weyl(gt, curv_t), curv_t.gamma);

  Curvature curv = compute_curvature(g);
  TensorField W = weyl(g, curv);
  TensorField divw = div_weyl(g, W, curv.gamma);
  TensorField grad = gradient(g, f);
  TensorField w_gradf = contract_last(W, grad.components());
  const Rational half(1, 2);
  TensorField out(g.chart(), 3, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        out.at(i, j, k) = divw_t.at(i, j, k) -
                          (divw.at(i, j, k) -
                           Expr::number(half) * w_gradf.at(i, j, k));
      }
    }
  }
  return out;
}

TensorField first_bianchi_residual(const TensorField& riem) {
  const int n = riem.dim();
  TensorField out(riem.chart(), 4, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          out.at(i, j, k, l) =
              riem.at(i, j, k, l) + riem.at(i, k, l, j) + riem.at(i, l, j, k);
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

TensorZeroResult combine_zero(TensorZeroResult a, const ZeroTester::Result& b) {
  auto rank = [](ZeroStatus s) {
    switch (s) {
      case ZeroStatus::Zero: return 0;
      case ZeroStatus::ProbablyZero: return 1;
      case ZeroStatus::ProbablyNonZero: return 2;
      case ZeroStatus::NonZero: return 3;
    }
    return 3;
  };
  if (rank(b.status) > rank(a.status)) a.status = b.status;
  a.max_abs = std::max(a.max_abs, b.max_abs);
  a.exact = a.exact && b.exact;
  return a;
}

TensorZeroResult tensor_zero_status(const TensorField& T, const ZeroTester& zt) {
  TensorZeroResult r;
  for (const auto& c : T.components()) r = combine_zero(r, zt.test(c));
  return r;
}

}  // namespace qe
