#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qe/ppwave.hpp"
#include "qe/suite.hpp"

using namespace qe;

namespace {

Expr sym(const char* s) { return Expr::symbol(s); }

bool literally_equal(const Expr& a, const Expr& b) {
  return (a - b).is_zero_literal();
}

}  // namespace

TEST_CASE("sum and product canonicalization") {
  Expr x = sym("x"), y = sym("y");
  CHECK(literally_equal(x + y - y, x));
  CHECK((x - x).is_zero_literal());
  CHECK(literally_equal(x * y - y * x, Expr()));
  CHECK(literally_equal(Expr::integer(2) * x + x, Expr::integer(3) * x));
  // (x + y)^2 expands, so the binomial identity is the literal zero.
  Expr sq = Expr::pow(x + y, 2);
  CHECK((sq - x * x - Expr::integer(2) * x * y - y * y).is_zero_literal());
  CHECK(literally_equal(Expr::pow(x, 2) * Expr::pow(x, 3), Expr::pow(x, 5)));
}

TEST_CASE("differentiation") {
  Expr x = sym("x"), y = sym("y");
  CHECK(literally_equal((x * x * y).diff("x"), Expr::integer(2) * x * y));
  CHECK(literally_equal(Expr::call(Fn::Exp, x).diff("x"), Expr::call(Fn::Exp, x)));
  CHECK(literally_equal(Expr::call(Fn::Sin, x).diff("x"), Expr::call(Fn::Cos, x)));
  CHECK(literally_equal(Expr::call(Fn::Log, x).diff("x"), Expr::pow(x, -1)));
  CHECK((x * y).diff("z").is_zero_literal());
  // chain rule through a power
  Expr e = Expr::pow(x * x + Expr::integer(1), -1);
  Expr expect = -Expr::integer(2) * x * Expr::pow(x * x + Expr::integer(1), -2);
  CHECK(literally_equal(e.diff("x"), expect));
}

TEST_CASE("numeric evaluation") {
  Expr x = sym("x");
  Expr e = Expr::call(Fn::Exp, x) + Expr::pow(x, 2);
  CHECK(e.eval({{"x", 0.5}}) == doctest::Approx(std::exp(0.5) + 0.25));
  CHECK_THROWS_AS(e.eval({}), EvalError);
  CHECK_THROWS_AS(Expr::call(Fn::Log, x).eval({{"x", -1.0}}), EvalError);
}

TEST_CASE("fraction normal form decides rational-class zero questions") {
  Expr x = sym("x");
  // x/(x+1) + 1/(x+1) - 1 == 0 identically
  Expr e = x * Expr::pow(x + Expr::integer(1), -1) +
           Expr::pow(x + Expr::integer(1), -1) - Expr::integer(1);
  auto [num, den] = as_fraction(e);
  CHECK(num.is_zero_literal());
  CHECK_FALSE(den.is_zero_literal());
  CHECK(ZeroTester().test(e).status == ZeroStatus::Zero);
}

TEST_CASE("rational_pow handles negative bases and exponents") {
  CHECK(rational_pow(Rational(-1), Integer(-1)) == Rational(-1));
  CHECK(rational_pow(Rational(2, 3), Integer(-2)) == Rational(9, 4));
  CHECK(rational_pow(Rational(-2), Integer(3)) == Rational(-8));
}

TEST_CASE("zero tester on transcendental identities") {
  Expr x = sym("x");
  Expr pythagorean = Expr::pow(Expr::call(Fn::Sin, x), 2) +
                     Expr::pow(Expr::call(Fn::Cos, x), 2) - Expr::integer(1);
  auto r = ZeroTester().test(pythagorean);
  CHECK(r.status == ZeroStatus::ProbablyZero);
  CHECK_FALSE(r.exact);

  auto nz = ZeroTester().test(Expr::call(Fn::Sin, x) - x);
  CHECK((nz.status == ZeroStatus::NonZero || nz.status == ZeroStatus::ProbablyNonZero));
  CHECK(ZeroTester().test(x * x - x * x).status == ZeroStatus::Zero);
}

TEST_CASE("document parsing") {
  const std::string src =
      "# flat plane\n"
      "chart x y;\n"
      "metric g[1][1] = 1;\n"
      "metric g[2][2] = 1;\n"
      "potential f = x^2;\n"
      "mu = -1/2;\n"
      "param a = 3;\n";
  MetricDocument doc = parse_document(src);
  CHECK(doc.chart.coords == std::vector<std::string>{"x", "y"});
  REQUIRE(doc.metric.has_value());
  CHECK(literally_equal((*doc.metric)[0], Expr::integer(1)));
  CHECK(literally_equal((*doc.metric)[1], Expr()));  // unset entries are 0
  CHECK(*doc.mu == Rational(-1, 2));
  REQUIRE(doc.potential.has_value());
  CHECK(literally_equal(*doc.potential, Expr::pow(sym("x"), 2)));
  CHECK(doc.params.size() == 1);

  // round-trip through the printer
  MetricDocument again = parse_document(pretty_print(doc));
  CHECK(again == doc);
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(parse_document("chart x y"), ParseError);           // missing ;
  CHECK_THROWS_AS(parse_document("chart x;\nmetric g[0][0] = 1;"), ParseError);
  CHECK_THROWS_AS(parse_document("chart x;\nmetric g[1][1] = 1;\nppwave_H = x;"),
                  ParseError);  // explicit block and profile together
  CHECK_THROWS_AS(parse_document("chart x;\nmetric g[1][1] = 1 + ;"), ParseError);
  CHECK_THROWS_AS(parse_expression("x +* y", {"x", "y"}), ParseError);
}

TEST_CASE("singular metric is rejected") {
  Chart ch{{"x", "y"}};
  std::vector<Expr> comp(4);
  comp[0] = Expr::integer(1);
  comp[1] = comp[2] = Expr::integer(1);
  comp[3] = Expr::integer(1);  // det == 0
  CHECK_THROWS_AS(MetricField::from_components(ch, comp), SingularMetricError);
}

TEST_CASE("wave-profile curvature calibration") {
  Expr x1 = sym("x1");
  MetricField g = build_ppwave(Expr::pow(x1, 3));
  Curvature c = compute_curvature(g);
  // chart order (u, v, x1, x2)
  CHECK(literally_equal(c.gamma.at(1, 0, 2), Expr::number(Rational(3, 2)) * Expr::pow(x1, 2)));
  CHECK(literally_equal(c.riemann.at(0, 2, 0, 2), Expr::integer(-3) * x1));
  CHECK(literally_equal(c.ricci.at(0, 0), Expr::integer(-3) * x1));
  CHECK(c.tau.is_zero_literal());

  TensorField W = weyl(g, c);
  CHECK(literally_equal(W.at(0, 2, 0, 2), Expr::number(Rational(-3, 2)) * x1));
  TensorField dW = div_weyl(g, W, c.gamma);
  CHECK(literally_equal(dW.at(0, 2, 0), Expr::number(Rational(-3, 2))));
  CHECK(literally_equal(dW.at(2, 0, 0), Expr::number(Rational(3, 2))));

  auto sig = g.signature_at(sample_point(g.chart()));
  CHECK(sig == std::vector<int>{-1, 1, 1, 1});
}

TEST_CASE("round sphere calibration") {
  Chart ch{{"th", "ph"}};
  std::vector<Expr> comp(4);
  comp[0] = Expr::integer(1);
  comp[3] = Expr::pow(Expr::call(Fn::Sin, sym("th")), 2);
  MetricField g = MetricField::from_components(ch, comp);
  Curvature c = compute_curvature(g);
  ZeroTester zt;
  CHECK(is_zeroish(zt.status(c.ricci.at(0, 0) - Expr::integer(1))));
  CHECK(is_zeroish(zt.status(c.tau - Expr::integer(2))));
  std::vector<Expr> X{Expr::integer(1), Expr()}, Y{Expr(), Expr::integer(1)};
  CHECK(is_zeroish(zt.status(sectional_curvature(g, c.riemann, X, Y) - Expr::integer(1))));
  CHECK(g.signature_at({{"th", 0.9}, {"ph", 0.4}}) == std::vector<int>{1, 1});
}

TEST_CASE("trace-derived lambda and residual recognize a structure") {
  Expr u = sym("u"), x1 = sym("x1"), x2 = sym("x2");
  MetricField g = build_ppwave(x1 * x1 + x2 * x2);
  QEStructure q(g, u * u, Rational(0));
  CHECK(q.is_qe());
  CHECK(q.qe_status().exact);
  CHECK(q.lambda().is_zero_literal());

  // perturbed potential fails
  QEStructure bad(g, u * u * u, Rational(0));
  CHECK_FALSE(bad.is_qe());
  CHECK_THROWS_AS(identity_residuals(bad), RefusedError);
}

TEST_CASE("differential identity residuals vanish exactly") {
  Expr u = sym("u"), x1 = sym("x1"), x2 = sym("x2");
  MetricField g = build_ppwave(Expr::number(Rational(-1, 2)) * (x1 * x1 + x2 * x2));
  QEStructure q(g, u, Rational(1));
  REQUIRE(q.is_qe());
  IdentityResiduals ir = identity_residuals(q);
  ZeroTester zt;
  CHECK(tensor_zero_status(ir.grad_laplacian, zt).status == ZeroStatus::Zero);
  CHECK(tensor_zero_status(ir.grad_scalar, zt).status == ZeroStatus::Zero);
  CHECK(tensor_zero_status(ir.curvature_grad, zt).status == ZeroStatus::Zero);
  CHECK(tensor_zero_status(ir.weyl_cotton, zt).status == ZeroStatus::Zero);
}

TEST_CASE("causal routing and the mu = -1/2 gate") {
  ZeroTester zt;

  // flat Euclidean 4-space with f = 2 log x is quasi-Einstein at mu = -1/2
  Chart ch{{"x", "y", "z", "w"}};
  std::vector<Expr> comp(16);
  for (int i = 0; i < 4; ++i) comp[i * 4 + i] = Expr::integer(1);
  MetricField g = MetricField::from_components(ch, comp);
  Expr f = Expr::integer(2) * Expr::call(Fn::Log, sym("x"));
  QEStructure q(g, f, Rational(-1, 2), zt);
  REQUIRE(q.is_qe());
  NumericPoint p = sample_point(ch);
  CHECK(causal_character(q, p, zt) == CausalCharacter::Spacelike);
  // the frame checks refuse at the excluded coupling constant
  CHECK_THROWS_AS(nonisotropic_structure_checks(q, p, zt), RefusedError);
  // and the isotropic suite refuses a non-null gradient
  CHECK_THROWS_AS(isotropic_invariant_suite(q, p, zt), RefusedError);
}

TEST_CASE("null gradient invariants on a plane wave") {
  Expr u = sym("u"), x1 = sym("x1"), x2 = sym("x2");
  MetricField g = build_ppwave(x1 * x1 + x2 * x2);
  ZeroTester zt;
  QEStructure q(g, u * u, Rational(0), zt);
  NumericPoint p = sample_point(g.chart());
  CHECK(causal_character(q, p, zt) == CausalCharacter::Null);
  for (const auto& [id, r] : isotropic_invariant_suite(q, p, zt)) {
    INFO(id);
    CHECK(is_zeroish(r.status));
  }
  for (const auto& [id, r] : parallel_distribution_check(g, q.f(), zt)) {
    INFO(id);
    CHECK(is_zeroish(r.status));
  }
}

TEST_CASE("wave-profile closed forms and classification predicates") {
  Expr u = sym("u"), x1 = sym("x1"), x2 = sym("x2");
  ZeroTester zt;

  CHECK_THROWS_AS(PPWaveSpec::make(sym("v") * x1), DegenerateInputError);

  PPWaveSpec cubic = PPWaveSpec::make(Expr::pow(x1, 3));
  PPWaveClosedForms cf = closed_form_weyl_divweyl(cubic);
  CHECK(literally_equal(cf.w[0][0], Expr::number(Rational(-3, 2)) * x1));
  CHECK(literally_equal(cf.d[0], Expr::number(Rational(-3, 2))));
  CHECK_FALSE(is_zeroish(is_lcf(cubic, zt)));
  CHECK_FALSE(is_zeroish(harmonic_weyl_condition(cubic, zt)));

  PPWaveSpec pw = PPWaveSpec::make(plane_wave_H(u, u, Expr(), Expr()));
  CHECK(is_zeroish(is_lcf(pw, zt)));
  CHECK(is_zeroish(harmonic_weyl_condition(pw, zt)));

  PPWaveSpec saddle = PPWaveSpec::make(x1 * x1 - x2 * x2 + u * x1 * x2);
  CHECK_FALSE(is_zeroish(is_lcf(saddle, zt)));
  CHECK(is_zeroish(harmonic_weyl_condition(saddle, zt)));
  CHECK(literally_equal(transverse_laplacian(saddle.H), Expr()));
}

TEST_CASE("polynomial antiderivative") {
  Expr u = sym("u");
  auto a = polynomial_antiderivative(u * u, "u");
  REQUIRE(a.has_value());
  CHECK(literally_equal(*a, Expr::number(Rational(1, 3)) * Expr::pow(u, 3)));
  CHECK(polynomial_antiderivative(Expr::call(Fn::Sin, u), "u") == std::nullopt);
  auto c = polynomial_antiderivative(Expr::integer(4), "u");
  REQUIRE(c.has_value());
  CHECK(literally_equal(*c, Expr::integer(4) * u));
}

TEST_CASE("potential equation integration, mu = 0 oracle") {
  PotentialODEProblem prob;
  prob.phi = Expr::integer(4);  // plane wave x1^2 + x2^2
  prob.mu = 0;
  prob.u_end = 1;
  prob.step = 1e-3;
  ODESolution sol = solve_potential_ode(prob);
  REQUIRE_FALSE(sol.blew_up);
  CHECK(sol.samples.size() == 1001);
  // exact solution is u^2; the residual column stores |f - oracle|
  double worst = 0;
  for (const auto& s : sol.samples) worst = std::max(worst, s.residual);
  CHECK(worst < 1e-10);
  CHECK(certify_trajectory(prob.phi, prob.mu, sol) < 1e-6);

  std::ostringstream csv;
  write_trajectory_csv(csv, sol);
  CHECK(csv.str().substr(0, 24) == "u,f,fprime,h,residual\n0,");
}

TEST_CASE("potential equation blow-up halts integration") {
  PotentialODEProblem prob;
  prob.phi = Expr();
  prob.mu = 1;
  prob.fp0 = 2;  // f' = 2/(1 - 2u) blows up at u = 1/2
  prob.u_end = 1;
  ODESolution sol = solve_potential_ode(prob);
  CHECK(sol.blew_up);
  CHECK(sol.blowup_u == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("symbolic certification of a wave-profile potential") {
  Expr u = sym("u"), x1 = sym("x1"), x2 = sym("x2");
  ZeroTester zt;
  PPWaveSpec pw = PPWaveSpec::make(x1 * x1 + x2 * x2);
  for (const auto& [id, r] : qe_certify(pw, Rational(0), u * u, zt)) {
    INFO(id);
    CHECK(is_zeroish(r.status));
  }
  // a potential leaning on transverse coordinates is refused off the
  // conformally flat locus
  CHECK_THROWS_AS(qe_certify(PPWaveSpec::make(Expr::pow(x1, 3)), Rational(0),
                             x1, zt),
                  RefusedError);
}

TEST_CASE("report serialization is deterministic and versioned") {
  VerificationReport rep;
  rep.seed = 7;
  rep.input_hash = fnv1a64("abc");
  TensorZeroResult ok;  // exact zero
  rep.add("a-check", "anchor text", ok, 12.5);
  CheckRecord neg;
  neg.id = "neg";
  neg.anchor = "control";
  neg.status = CheckStatus::NonZero;
  neg.expected_pass = false;
  rep.add(neg);
  CHECK(rep.all_passed());

  nlohmann::json j = report_to_json(rep);
  CHECK(j["report_version"] == 1);
  CHECK(j["seed"] == 7);
  CHECK(j["checks"].size() == 2);
  CHECK(j["checks"][0]["residual"] == "exact");
  CHECK_FALSE(j.contains("timestamp"));
  CHECK(j["checks"][0].count("wall_ms") == 0);
  CHECK(report_to_json(rep).dump() == j.dump());

  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
}

TEST_CASE("corpus loads and the bundled sample point is in range") {
  std::vector<CorpusEntry> corpus = load_corpus(QE_CORPUS_DIR);
  CHECK(corpus.size() >= 10);
  for (const auto& e : corpus) {
    MetricField g = metric_from_document(e.doc);
    NumericPoint p = sample_point(g.chart());
    CHECK(p.size() == static_cast<size_t>(g.dim()));
    CHECK(std::abs(g.det().eval(p)) > 1e-12);
  }
}
