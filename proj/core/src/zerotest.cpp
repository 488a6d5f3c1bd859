#include "qe/zerotest.hpp"

#include <cmath>
#include <random>

namespace qe {

const char* zero_status_name(ZeroStatus s) {
  switch (s) {
    case ZeroStatus::Zero: return "Zero";
    case ZeroStatus::NonZero: return "NonZero";
    case ZeroStatus::ProbablyZero: return "ProbablyZero";
    case ZeroStatus::ProbablyNonZero: return "ProbablyNonZero";
  }
  return "?";
}

ZeroTester::Result ZeroTester::test(const Expr& e) const {
  if (e.is_zero_literal()) return {ZeroStatus::Zero, 0.0, true};
  if (e.rational_class()) {
    auto [num, den] = as_fraction(e);
    (void)den;  // denominators are nonzero as functions by construction
    if (num.is_zero_literal()) return {ZeroStatus::Zero, 0.0, true};
    return {ZeroStatus::NonZero, 0.0, true};
  }

  auto syms = e.free_symbols();
  std::mt19937_64 rng(seed_);
  std::uniform_real_distribution<double> mag(0.1, 2.0);
  std::bernoulli_distribution flip(0.5);

  int resamples = 0;
  double max_abs = 0.0;
  bool all_small = true;
  const int points = syms.empty() ? 1 : kSamplePoints;
  for (int i = 0; i < points; ++i) {
    for (;;) {
      NumericPoint p;
      for (const auto& s : syms) {
        double v = mag(rng);
        if (flip(rng)) v = -v;
        p[s] = v;
      }
      try {
        double scale = 0.0;
        double v = e.eval(p, &scale);
        max_abs = std::max(max_abs, std::abs(v));
        if (std::abs(v) >= kRelTolerance * (1.0 + scale)) all_small = false;
        break;
      } catch (const EvalError&) {
        if (++resamples > kMaxResamples) {
          throw SamplingError("zero test exceeded " +
                              std::to_string(kMaxResamples) +
                              " resamples: " + e.str());
        }
      }
    }
  }
  return {all_small ? ZeroStatus::ProbablyZero : ZeroStatus::ProbablyNonZero,
          max_abs, false};
}

}  // namespace qe
