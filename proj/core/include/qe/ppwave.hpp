#pragma once

#include <iosfwd>
#include <optional>

#include "qe/qe_structure.hpp"

namespace qe {

/// Wave profile H(u, x1, x2) inducing the metric
/// 2 du dv + H du^2 + dx1^2 + dx2^2 on the chart (u, v, x1, x2).
struct PPWaveSpec {
  Expr H;
  static Chart chart();  // {u, v, x1, x2}
  static PPWaveSpec make(Expr H);  // rejects H depending on v
};

MetricField build_ppwave(const PPWaveSpec& spec);
MetricField build_ppwave(const Expr& H);

/// Closed forms for the only possibly nonzero Weyl and div-W slots of a
/// pp-wave. w[a][b] = W(du, dx_{a+1}, du, dx_{b+1}); d[a] = div W(du, dx_{a+1}, du).
struct PPWaveClosedForms {
  Expr w[2][2];
  Expr d[2];
};
PPWaveClosedForms closed_form_weyl_divweyl(const PPWaveSpec& spec);

/// Transverse Laplacian of the profile: H_11 + H_22.
Expr transverse_laplacian(const Expr& H);

/// Conformally flat <=> all four closed-form Weyl slots vanish.
ZeroStatus is_lcf(const PPWaveSpec& spec, const ZeroTester& zt);
/// Harmonic Weyl <=> the transverse Laplacian of H depends on u alone.
ZeroStatus harmonic_weyl_condition(const PPWaveSpec& spec, const ZeroTester& zt);

/// H = a(u)(x1^2 + x2^2) + b1(u) x1 + b2(u) x2 + c(u); inputs must
/// depend on u alone.
Expr plane_wave_H(const Expr& a, const Expr& b1, const Expr& b2, const Expr& c);

/// Potential equation along u: f'' = mu f'^2 + phi(u)/2 with
/// phi = transverse Laplacian of H, assumed a function of u alone.
struct PotentialODEProblem {
  Expr phi;
  Rational mu;
  double u0 = 0, f0 = 0, fp0 = 0;
  double u_end = 1;
  double step = 1e-3;
};

struct ODESample {
  double u, f, fp;
  double h;         // e^{-mu f} companion from the linear equation
  double residual;  // |f - oracle| where an oracle applies, else 0
};

struct ODESolution {
  std::vector<ODESample> samples;
  bool blew_up = false;       // |f'| crossed 1e6; integration halted
  double blowup_u = 0;
  bool h_breakdown = false;   // h reached <= 0: log branch invalid from here
  double h_breakdown_u = 0;
  /// max |f_direct + log(h)/mu| over samples with h > 0.1 (mu != 0)
  double max_discrepancy = 0;
};

/// Classical fixed-step 4th-order integration of (f, f'). For mu != 0
/// the linear companion h'' + (mu/2) phi h = 0 is integrated alongside
/// and -log(h)/mu serves as the oracle; for mu = 0 and polynomial phi
/// the exact double antiderivative does.
ODESolution solve_potential_ode(const PotentialODEProblem& p);

void write_trajectory_csv(std::ostream& os, const ODESolution& sol);

/// Exact antiderivative of a polynomial in `var` (rational coefficients);
/// empty when the expression is not such a polynomial.
std::optional<Expr> polynomial_antiderivative(const Expr& e, const std::string& var);

/// Closed-form mu = 0 solution f0 + fp0 (u - u0) + double antiderivative
/// of phi/2, when phi is polynomial in u.
std::optional<Expr> mu_zero_closed_form(const Expr& phi, double u0, double f0,
                                        double fp0);

/// Certification of a symbolic potential f on a pp-wave: the residual
/// statuses of (i) Q(f) = 0, (ii) div W = 0, (iii) transverse Laplacian
/// of H a function of u alone, the consequence W(.,.,.,grad f) = 0, the
/// forced lambda = 0, and the pairwise consistency of (i)-(iii).
SuiteFragment qe_certify(const PPWaveSpec& spec, const Rational& mu, const Expr& f,
                         const ZeroTester& zt);

/// Max |f'' - mu f'^2 - phi/2| along a numeric trajectory, with f''
/// estimated by finite differences of f'.
double certify_trajectory(const Expr& phi, const Rational& mu,
                          const ODESolution& sol);

}  // namespace qe
