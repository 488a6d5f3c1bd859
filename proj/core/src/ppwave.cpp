#include "qe/ppwave.hpp"

namespace qe {

Chart PPWaveSpec::chart() { return Chart{{"u", "v", "x1", "x2"}}; }

PPWaveSpec PPWaveSpec::make(Expr H) {
  if (H.depends_on("v")) {
    throw DegenerateInputError("wave profile must not depend on v");
  }
  return PPWaveSpec{std::move(H)};
}

MetricField build_ppwave(const PPWaveSpec& spec) {
  Chart ch = PPWaveSpec::chart();
  std::vector<Expr> g(16, Expr());
  g[0 * 4 + 0] = spec.H;
  g[0 * 4 + 1] = Expr::integer(1);
  g[1 * 4 + 0] = Expr::integer(1);
  g[2 * 4 + 2] = Expr::integer(1);
  g[3 * 4 + 3] = Expr::integer(1);
  return MetricField::from_components(std::move(ch), std::move(g));
}

MetricField build_ppwave(const Expr& H) { return build_ppwave(PPWaveSpec::make(H)); }

PPWaveClosedForms closed_form_weyl_divweyl(const PPWaveSpec& spec) {
  const Expr& H = spec.H;
  Expr h11 = H.diff("x1").diff("x1");
  Expr h12 = H.diff("x1").diff("x2");
  Expr h22 = H.diff("x2").diff("x2");
  const Expr quarter = Expr::number(Rational(1, 4));
  const Expr neg_half = Expr::number(Rational(-1, 2));
  PPWaveClosedForms cf;
  cf.w[0][0] = quarter * (h22 - h11);
  cf.w[0][1] = neg_half * h12;
  cf.w[1][0] = cf.w[0][1];
  cf.w[1][1] = quarter * (h11 - h22);
  cf.d[0] = -quarter * (h11.diff("x1") + h22.diff("x1"));
  cf.d[1] = -quarter * (h11.diff("x2") + h22.diff("x2"));
  return cf;
}

Expr transverse_laplacian(const Expr& H) {
  return H.diff("x1").diff("x1") + H.diff("x2").diff("x2");
}

ZeroStatus is_lcf(const PPWaveSpec& spec, const ZeroTester& zt) {
  PPWaveClosedForms cf = closed_form_weyl_divweyl(spec);
  TensorZeroResult r;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) r = combine_zero(r, zt.test(cf.w[a][b]));
  }
  return r.status;
}

ZeroStatus harmonic_weyl_condition(const PPWaveSpec& spec, const ZeroTester& zt) {
  Expr lap = transverse_laplacian(spec.H);
  TensorZeroResult r;
  r = combine_zero(r, zt.test(lap.diff("x1")));
  r = combine_zero(r, zt.test(lap.diff("x2")));
  return r.status;
}

Expr plane_wave_H(const Expr& a, const Expr& b1, const Expr& b2, const Expr& c) {
  for (const Expr* e : {&a, &b1, &b2, &c}) {
    for (const auto& s : e->free_symbols()) {
      if (s != "u") {
        throw DegenerateInputError("plane-wave coefficients must depend on u alone");
      }
    }
  }
  Expr x1 = Expr::symbol("x1"), x2 = Expr::symbol("x2");
  return a * (x1 * x1 + x2 * x2) + b1 * x1 + b2 * x2 + c;
}

SuiteFragment qe_certify(const PPWaveSpec& spec, const Rational& mu, const Expr& f,
                         const ZeroTester& zt) {
  if (f.depends_on("v") || f.depends_on("x1") || f.depends_on("x2")) {
    if (!is_zeroish(is_lcf(spec, zt))) {
      throw RefusedError(
          "potential depends on v/x1/x2 while the profile is not conformally flat");
    }
  }
  MetricField g = build_ppwave(spec);
  QEStructure q(g, f, mu, zt);
  PPWaveClosedForms cf = closed_form_weyl_divweyl(spec);

  SuiteFragment out;
  out.emplace_back("qe-residual", q.qe_status());

  TensorZeroResult lam = combine_zero(TensorZeroResult{}, zt.test(q.lambda()));
  out.emplace_back("lambda-vanishes", lam);

  TensorZeroResult divw;
  divw = combine_zero(divw, zt.test(cf.d[0]));
  divw = combine_zero(divw, zt.test(cf.d[1]));
  out.emplace_back("divw-vanishes", divw);

  Expr lap = transverse_laplacian(spec.H);
  TensorZeroResult prof;
  prof = combine_zero(prof, zt.test(lap.diff("x1")));
  prof = combine_zero(prof, zt.test(lap.diff("x2")));
  out.emplace_back("profile-laplacian-of-u", prof);

  TensorField W = weyl(g, q.curvature());
  TensorField wg = contract_last(W, q.grad().components());
  out.emplace_back("weyl-gradient-contraction", tensor_zero_status(wg, zt));

  // (ii) <=> (iii) always; a passing potential additionally forces both.
  bool ii = is_zeroish(divw.status);
  bool iii = is_zeroish(prof.status);
  bool i_pass = is_zeroish(q.qe_status().status);
  bool consistent = (ii == iii) && (!i_pass || (ii && iii));
  TensorZeroResult eqv;
  eqv.status = consistent ? ZeroStatus::Zero : ZeroStatus::NonZero;
  out.emplace_back("equivalence-consistent", eqv);
  return out;
}

}  // namespace qe
