#pragma once

#include <vector>

#include "qe/expr.hpp"
#include "qe/parser.hpp"
#include "qe/zerotest.hpp"

namespace qe {

struct SingularMetricError : std::runtime_error {
  explicit SingularMetricError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Symmetry { None, SymmetricPair, RiemannType };

/// Dense array of expression components indexed in chart order. The
/// valence records how many lower and upper slots the components carry;
/// storage is index-order agnostic beyond that.
class TensorField {
 public:
  TensorField(Chart chart, int lower, int upper, Symmetry sym = Symmetry::None);

  const Chart& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  int lower() const { return lower_; }
  int upper() const { return upper_; }
  int rank() const { return lower_ + upper_; }
  Symmetry symmetry() const { return sym_; }

  Expr& at(const std::vector<int>& idx) { return c_[flat(idx)]; }
  const Expr& at(const std::vector<int>& idx) const { return c_[flat(idx)]; }
  Expr& at(int i, int j) { return c_[i * dim() + j]; }
  const Expr& at(int i, int j) const { return c_[i * dim() + j]; }
  Expr& at(int i, int j, int k) { return c_[(i * dim() + j) * dim() + k]; }
  const Expr& at(int i, int j, int k) const { return c_[(i * dim() + j) * dim() + k]; }
  Expr& at(int i, int j, int k, int l) {
    return c_[((i * dim() + j) * dim() + k) * dim() + l];
  }
  const Expr& at(int i, int j, int k, int l) const {
    return c_[((i * dim() + j) * dim() + k) * dim() + l];
  }

  const std::vector<Expr>& components() const { return c_; }
  std::vector<Expr>& components() { return c_; }
  size_t size() const { return c_.size(); }

  TensorField operator-(const TensorField& other) const;
  TensorField operator+(const TensorField& other) const;

 private:
  size_t flat(const std::vector<int>& idx) const;
  Chart chart_;
  int lower_, upper_;
  Symmetry sym_;
  std::vector<Expr> c_;
};

/// Metric with exact cofactor inverse.
class MetricField {
 public:
  static MetricField from_components(Chart chart, std::vector<Expr> g_lower);
  static MetricField from_document(const MetricDocument& doc);

  const Chart& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  const Expr& g(int i, int j) const { return g_[i * dim() + j]; }
  const Expr& inv(int i, int j) const { return ginv_[i * dim() + j]; }
  const Expr& det() const { return det_; }

  TensorField lower_tensor() const;  // g as a (0,2) tensor field

  /// Signs of the metric eigenvalues at a point (sorted ascending).
  std::vector<int> signature_at(const NumericPoint& p) const;

 private:
  MetricField(Chart chart, std::vector<Expr> g, std::vector<Expr> ginv, Expr det)
      : chart_(std::move(chart)), g_(std::move(g)), ginv_(std::move(ginv)),
        det_(std::move(det)) {}
  Chart chart_;
  std::vector<Expr> g_, ginv_;
  Expr det_;
};

/// Curvature objects of a metric, computed once and shared.
struct Curvature {
  TensorField gamma;    // Christoffel symbols, index order [k][i][j] for Gamma^k_ij
  TensorField riemann;  // (0,4) components R_ijkl, sign convention below
  TensorField ricci;    // (0,2)
  Expr tau;             // scalar curvature
};

// Component sign convention: the (0,4) curvature is the negative of the
// coordinate expression built from R^m_ijk = d_i Gamma^m_jk - d_j Gamma^m_ik
// + Gamma-squared terms. The choice is pinned by a calibration test
// requiring the engine's Weyl tensor of a pp-wave profile H to equal the
// closed forms W(du,dx1,du,dx1) = (H_22 - H_11)/4 and
// W(du,dx1,du,dx2) = -H_12/2.
Curvature compute_curvature(const MetricField& g);

TensorField christoffel(const MetricField& g);
TensorField riemann(const MetricField& g);
TensorField ricci(const MetricField& g, const TensorField& riem);
Expr scalar_curvature(const MetricField& g, const TensorField& ric);

/// Sectional curvature of the coordinate plane spanned by two vectors.
Expr sectional_curvature(const MetricField& g, const TensorField& riem,
                         const std::vector<Expr>& X, const std::vector<Expr>& Y);

TensorField hessian(const MetricField& g, const Expr& f, const TensorField& gamma);
TensorField gradient(const MetricField& g, const Expr& f);  // (0 lower, 1 upper)
Expr laplacian(const MetricField& g, const Expr& f, const TensorField& gamma);
Expr grad_norm_sq(const MetricField& g, const Expr& f);

/// Weyl tensor in dimension 4:
///   W = R + tau/6 (g(X,Z)g(Y,T) - g(X,T)g(Y,Z))
///     + 1/2 (rho(X,T)g(Y,Z) - rho(X,Z)g(Y,T) + rho(Y,Z)g(X,T) - rho(Y,T)g(X,Z))
TensorField weyl(const MetricField& g, const Curvature& curv);

/// Covariant derivative; the new lower index is prepended.
TensorField covariant_derivative(const MetricField& g, const TensorField& T,
                                 const TensorField& gamma);

/// (div W)(X,Y,Z) = g^{ab} (nabla_a W)(X,Y,Z,e_b), dimension 4; the
/// contraction pairs with the last Weyl slot, so the result is
/// antisymmetric in (X,Y).
TensorField div_weyl(const MetricField& g, const TensorField& W,
                     const TensorField& gamma);

/// div T for a symmetric (0,2) tensor: (div T)_k = g^{ab} (nabla_a T)_{bk}.
TensorField divergence_sym2(const MetricField& g, const TensorField& T,
                            const TensorField& gamma);

/// Contracts the last slot of a lower-index tensor with an upper-index
/// vector.
TensorField contract_last(const TensorField& T, const std::vector<Expr>& vec);

/// Raise one lower slot with the inverse metric (slot is 0-based).
TensorField raise_index(const MetricField& g, const TensorField& T, int slot);
TensorField lower_index(const MetricField& g, const TensorField& T, int slot);

MetricField conformal_metric(const MetricField& g, const Expr& f);  // e^{-f} g

/// Residual of the conformal Ricci rule for g~ = e^{-f} g in dimension 4:
///   ricci(g~) - [rho + Hes_f + 1/2 df (x) df + 1/2 (Lap f - |grad f|^2) g]
TensorField conformal_ricci_residual(const MetricField& g, const Expr& f);

/// Residual of div W~ = div W - 1/2 W(.,.,.,grad f) where W~ and its
/// divergence are computed for g~ = e^{-f} g with its own connection.
TensorField conformal_divweyl_residual(const MetricField& g, const Expr& f);

/// First Bianchi residual R_{i[jkl]} as a (0,4) tensor.
TensorField first_bianchi_residual(const TensorField& riem);

/// Aggregate a zero status over all components of a tensor.
struct TensorZeroResult {
  ZeroStatus status = ZeroStatus::Zero;
  double max_abs = 0.0;
  bool exact = true;
};
TensorZeroResult tensor_zero_status(const TensorField& T, const ZeroTester& zt);
TensorZeroResult combine_zero(TensorZeroResult a, const ZeroTester::Result& b);

}  // namespace qe
