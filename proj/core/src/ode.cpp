#include "qe/ppwave.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace qe {

std::optional<Expr> polynomial_antiderivative(const Expr& e, const std::string& var) {
  for (const auto& s : e.free_symbols()) {
    if (s != var) return std::nullopt;
  }
  if (!e.rational_class()) return std::nullopt;
  // Taylor coefficients at 0; non-polynomials either fail to evaluate
  // there or never differentiate down to zero.
  std::vector<Rational> coeffs;
  Expr d = e;
  Rational factorial = 1;
  for (int k = 0; !d.is_zero_literal(); ++k) {
    if (k > 64) return std::nullopt;
    if (k > 0) factorial *= k;
    Expr at0;
    try {
      at0 = d.substitute({{var, Expr()}});
    } catch (const ExprError&) {
      return std::nullopt;
    }
    if (!at0.is_number()) return std::nullopt;
    coeffs.push_back(at0.number_value() / factorial);
    d = d.diff(var);
  }
  std::vector<Expr> terms;
  Expr x = Expr::symbol(var);
  for (size_t k = 0; k < coeffs.size(); ++k) {
    Rational c = coeffs[k] / Rational(k + 1);
    terms.push_back(Expr::number(c) * Expr::pow(x, Rational(k + 1)));
  }
  return Expr::add(std::move(terms));
}

std::optional<Expr> mu_zero_closed_form(const Expr& phi, double u0, double f0,
                                        double fp0) {
  auto g1 = polynomial_antiderivative(phi * Expr::number(Rational(1, 2)), "u");
  if (!g1) return std::nullopt;
  auto g2 = polynomial_antiderivative(*g1, "u");
  if (!g2) return std::nullopt;
  // doubles convert to rationals exactly
  Expr u = Expr::symbol("u");
  Expr eu0 = Expr::number(Rational(u0));
  Expr shift = u - eu0;
  Expr g2_at0 = g2->substitute({{"u", eu0}});
  Expr g1_at0 = g1->substitute({{"u", eu0}});
  return Expr::number(Rational(f0)) + Expr::number(Rational(fp0)) * shift +
         *g2 - g2_at0 - g1_at0 * shift;
}

ODESolution solve_potential_ode(const PotentialODEProblem& p) {
  if (p.step <= 0) throw DegenerateInputError("step must be positive");
  for (const auto& s : p.phi.free_symbols()) {
    if (s != "u") throw DegenerateInputError("phi must depend on u alone");
  }
  const double mu = static_cast<double>(p.mu);
  const bool linearized = p.mu != 0;
  auto phi_at = [&](double u) { return p.phi.eval({{"u", u}}); };

  std::optional<Expr> oracle;
  if (p.mu == 0) oracle = mu_zero_closed_form(p.phi, p.u0, p.f0, p.fp0);

  // state: f, f', h, h' with h'' = -(mu/2) phi h
  double y[4] = {p.f0, p.fp0, std::exp(-mu * p.f0),
                 -mu * p.fp0 * std::exp(-mu * p.f0)};
  auto rhs = [&](double u, const double* s, double* out) {
    double phi = phi_at(u);
    out[0] = s[1];
    out[1] = mu * s[1] * s[1] + 0.5 * phi;
    out[2] = s[3];
    out[3] = -0.5 * mu * phi * s[2];
  };

  ODESolution sol;
  const long n = std::lround((p.u_end - p.u0) / p.step);
  double u = p.u0;
  for (long i = 0;; ++i) {
    ODESample smp{u, y[0], y[1], linearized ? y[2] : 1.0, 0.0};
    if (linearized) {
      if (!sol.h_breakdown && y[2] <= 0) {
        sol.h_breakdown = true;
        sol.h_breakdown_u = u;
      }
      if (y[2] > 0) {
        smp.residual = std::abs(y[0] + std::log(y[2]) / mu);
        if (y[2] > 0.1) {
          sol.max_discrepancy = std::max(sol.max_discrepancy, smp.residual);
        }
      }
    } else if (oracle) {
      smp.residual = std::abs(y[0] - oracle->eval({{"u", u}}));
    }
    sol.samples.push_back(smp);
    if (i == n) break;
    if (std::abs(y[1]) > 1e6) {
      sol.blew_up = true;
      sol.blowup_u = u;
      break;
    }
    double k1[4], k2[4], k3[4], k4[4], t[4];
    const double h = p.step;
    rhs(u, y, k1);
    for (int j = 0; j < 4; ++j) t[j] = y[j] + 0.5 * h * k1[j];
    rhs(u + 0.5 * h, t, k2);
    for (int j = 0; j < 4; ++j) t[j] = y[j] + 0.5 * h * k2[j];
    rhs(u + 0.5 * h, t, k3);
    for (int j = 0; j < 4; ++j) t[j] = y[j] + h * k3[j];
    rhs(u + h, t, k4);
    for (int j = 0; j < 4; ++j) {
      y[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    }
    u = p.u0 + (i + 1) * p.step;
  }
  return sol;
}

void write_trajectory_csv(std::ostream& os, const ODESolution& sol) {
  os << "u,f,fprime,h,residual\n" << std::setprecision(17);
  for (const auto& s : sol.samples) {
    os << s.u << ',' << s.f << ',' << s.fp << ',' << s.h << ',' << s.residual
       << '\n';
  }
}

double certify_trajectory(const Expr& phi, const Rational& mu,
                          const ODESolution& sol) {
  const double m = static_cast<double>(mu);
  double worst = 0;
  for (size_t i = 1; i + 1 < sol.samples.size(); ++i) {
    const auto& a = sol.samples[i - 1];
    const auto& b = sol.samples[i];
    const auto& c = sol.samples[i + 1];
    double fpp = (c.fp - a.fp) / (c.u - a.u);
    double q11 = fpp - m * b.fp * b.fp - 0.5 * phi.eval({{"u", b.u}});
    worst = std::max(worst, std::abs(q11));
  }
  return worst;
}

}  // namespace qe
