#pragma once

#include <cstdint>
#include <string>

#include "qe/expr.hpp"

namespace qe {

enum class ZeroStatus { Zero, NonZero, ProbablyZero, ProbablyNonZero };

const char* zero_status_name(ZeroStatus s);

inline bool is_zeroish(ZeroStatus s) {
  return s == ZeroStatus::Zero || s == ZeroStatus::ProbablyZero;
}

struct SamplingError : std::runtime_error {
  explicit SamplingError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Decides whether an expression is identically zero. Polynomial and
/// rational expressions are decided exactly through the fraction normal
/// form; expressions with transcendental nodes are sampled at seeded
/// pseudorandom points in [-2,-0.1] u [0.1,2] per symbol.
class ZeroTester {
 public:
  explicit ZeroTester(std::uint64_t seed = 42) : seed_(seed) {}

  struct Result {
    ZeroStatus status = ZeroStatus::Zero;
    double max_abs = 0.0;  // largest sampled |value| (0 for exact verdicts)
    bool exact = true;
  };

  Result test(const Expr& e) const;
  ZeroStatus status(const Expr& e) const { return test(e).status; }

  std::uint64_t seed() const { return seed_; }

  static constexpr int kSamplePoints = 20;
  static constexpr int kMaxResamples = 100;
  static constexpr double kRelTolerance = 1e-9;

 private:
  std::uint64_t seed_;
};

}  // namespace qe
