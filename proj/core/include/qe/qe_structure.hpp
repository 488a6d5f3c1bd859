#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qe/tensor.hpp"

namespace qe {

/// Raised when a check's mathematical preconditions do not hold; the
/// check is refused rather than reporting a meaningless residual.
struct RefusedError : std::runtime_error {
  explicit RefusedError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateInputError : std::runtime_error {
  explicit DegenerateInputError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class CausalCharacter { Spacelike, Timelike, Null, ZeroVector };
const char* causal_character_name(CausalCharacter c);

Expr lambda_from_trace(const MetricField& g, const Expr& f, const Rational& mu);

/// Metric + potential + mu with the trace-derived lambda and the
/// quasi-Einstein residual Q(f) = Hes_f + rho - mu df(x)df - lambda g.
/// Q(f) normalizing to zero is what being quasi-Einstein means here;
/// lambda is never user-supplied, so the trace relation
/// n lambda = Lap f + tau - mu |grad f|^2 holds by construction.
class QEStructure {
 public:
  QEStructure(MetricField g, Expr f, Rational mu,
              const ZeroTester& zt = ZeroTester());

  const MetricField& metric() const { return g_; }
  const Expr& f() const { return f_; }
  const Rational& mu() const { return mu_; }
  const Expr& lambda() const { return lambda_; }
  const Curvature& curvature() const { return curv_; }
  const TensorField& grad() const { return grad_; }      // (1 upper)
  const TensorField& hessian() const { return hes_; }    // (0,2)
  const Expr& df(int i) const { return df_[i]; }         // coordinate partials
  const Expr& laplacian() const { return lap_; }
  const Expr& grad_norm_sq() const { return gns_; }

  const TensorField& qe_residual() const { return q_; }
  const TensorZeroResult& qe_status() const { return q_status_; }
  bool is_qe() const { return is_zeroish(q_status_.status); }

  TensorField bakry_emery_ricci() const;  // rho + Hes_f - mu df(x)df

 private:
  MetricField g_;
  Expr f_;
  Rational mu_;
  Curvature curv_;
  TensorField grad_, hes_;
  std::vector<Expr> df_;
  Expr lap_, gns_, lambda_;
  TensorField q_;
  TensorZeroResult q_status_;
};

/// Residuals (LHS - RHS) of the four differential identities every
/// quasi-Einstein structure satisfies in dimension 4. Refuses when the
/// structure is not quasi-Einstein: the identities presuppose Q(f) = 0.
struct IdentityResiduals {
  TensorField grad_laplacian;  // 1-form: gradient of the traced equation
  TensorField grad_scalar;     // 1-form: scalar-curvature gradient identity
  TensorField curvature_grad;  // (0,3): R(X,Y,Z,grad f) expansion
  TensorField weyl_cotton;     // (0,3): W(X,Y,Z,grad f) vs 2 div W + lower terms
};
IdentityResiduals identity_residuals(const QEStructure& q);

struct HarmonicityChecks {
  TensorZeroResult divw;     // div W = 0
  TensorZeroResult w_gradf;  // W(.,.,.,grad f) = 0
};
HarmonicityChecks harmonicity_checks(const MetricField& g, const Expr& f,
                                     const ZeroTester& zt);

/// Causal type of grad f at a point; Null demands |grad f|^2 zero with a
/// nonvanishing gradient at the point.
CausalCharacter causal_character(const QEStructure& q, const NumericPoint& p,
                                 const ZeroTester& zt);

/// Named residual statuses produced by a structure suite.
using SuiteFragment = std::vector<std::pair<std::string, TensorZeroResult>>;

/// Checks that follow for a null-gradient quasi-Einstein structure:
/// Ric(grad f) = lambda grad f, tau = 4 lambda, Lap f = 0,
/// grad lambda = -lambda grad f, lambda = 0, and Ricci of rank <= 1 with
/// null image. Preconditions: causal character Null, div W = 0 and
/// W(.,.,.,grad f) = 0; refused otherwise.
SuiteFragment isotropic_invariant_suite(const QEStructure& q, const NumericPoint& p,
                                        const ZeroTester& zt);

/// Verifies span{grad f} is parallel (2x2 minors of (nabla_a grad f,
/// grad f) vanish) and the induced curvature vanishing: with D the span
/// and Dperp its orthogonal complement, R(D,Dperp,.,.) = 0,
/// R(Dperp,Dperp,D,.) = 0, and R(Dperp,Dperp,.,.) = 0. The complement
/// basis is built from coordinate vectors against the first coordinate
/// whose df-component is nonzero.
SuiteFragment parallel_distribution_check(const MetricField& g, const Expr& f,
                                          const ZeroTester& zt);

/// Checks for a spacelike/timelike gradient with mu != -1/2 and harmonic
/// conditions: builds the orthonormal frame E1 = grad f/|grad f| completed
/// by Gram-Schmidt over coordinate vectors in chart order, then checks
/// Ricci diagonality in the frame, umbilicity of the level hypersurfaces,
/// and the algebraic curvature relation that forces both.
SuiteFragment nonisotropic_structure_checks(const QEStructure& q,
                                            const NumericPoint& p,
                                            const ZeroTester& zt);

}  // namespace qe
