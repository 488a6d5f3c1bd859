#include <benchmark/benchmark.h>

#include "qe/ppwave.hpp"
#include "qe/suite.hpp"

namespace {

qe::Expr plane_profile() {
  qe::Expr x1 = qe::Expr::symbol("x1"), x2 = qe::Expr::symbol("x2");
  return x1 * x1 + x2 * x2;
}

qe::Expr mixed_profile() {
  qe::Expr u = qe::Expr::symbol("u");
  qe::Expr x1 = qe::Expr::symbol("x1"), x2 = qe::Expr::symbol("x2");
  return x1 * x1 - x2 * x2 + u * u * (x1 * x1 + x2 * x2);
}

void BM_curvature(benchmark::State& state) {
  qe::MetricField g = qe::build_ppwave(mixed_profile());
  for (auto _ : state) benchmark::DoNotOptimize(qe::compute_curvature(g));
}
BENCHMARK(BM_curvature);

void BM_weyl_divergence(benchmark::State& state) {
  qe::MetricField g = qe::build_ppwave(mixed_profile());
  qe::Curvature curv = qe::compute_curvature(g);
  qe::TensorField W = qe::weyl(g, curv);
  for (auto _ : state)
    benchmark::DoNotOptimize(qe::div_weyl(g, W, curv.gamma));
}
BENCHMARK(BM_weyl_divergence);

void BM_structure_residual(benchmark::State& state) {
  qe::MetricField g = qe::build_ppwave(plane_profile());
  qe::Expr f = qe::Expr::symbol("u") * qe::Expr::symbol("u");
  for (auto _ : state) {
    qe::QEStructure q(g, f, qe::Rational(0));
    benchmark::DoNotOptimize(q.qe_status());
  }
}
BENCHMARK(BM_structure_residual);

void BM_identity_residuals(benchmark::State& state) {
  qe::MetricField g = qe::build_ppwave(plane_profile());
  qe::QEStructure q(g, qe::Expr::symbol("u") * qe::Expr::symbol("u"),
                    qe::Rational(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(qe::identity_residuals(q));
}
BENCHMARK(BM_identity_residuals);

void BM_zero_test_transcendental(benchmark::State& state) {
  qe::Expr x = qe::Expr::symbol("x");
  qe::Expr e = qe::Expr::pow(qe::Expr::call(qe::Fn::Sin, x), 2) +
               qe::Expr::pow(qe::Expr::call(qe::Fn::Cos, x), 2) -
               qe::Expr::integer(1);
  qe::ZeroTester zt;
  for (auto _ : state) benchmark::DoNotOptimize(zt.test(e));
}
BENCHMARK(BM_zero_test_transcendental);

void BM_potential_ode(benchmark::State& state) {
  qe::PotentialODEProblem prob;
  prob.phi = qe::Expr::integer(4);
  prob.mu = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(qe::solve_potential_ode(prob));
}
BENCHMARK(BM_potential_ode);

}  // namespace

BENCHMARK_MAIN();
