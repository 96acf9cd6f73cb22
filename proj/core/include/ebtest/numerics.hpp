#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace ebtest::numerics {

/// Neumaier-compensated running sum. Order of additions still matters for
/// bitwise reproducibility, so callers fold in a fixed order.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double compensated_sum(std::span<const double> values) noexcept;

struct BisectionOptions {
  double abs_width = 1e-13;
  double rel_width = 0.0;
  int max_iterations = 200;
};

struct BisectionResult {
  double root = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Bisection on [lo, hi] where f(lo) and f(hi) have opposite signs (or one is zero).
/// Stops when the bracket is narrower than abs_width + rel_width * |mid|, or the
/// midpoint can no longer be represented between the endpoints.
BisectionResult bisect(const std::function<double(double)>& f, double lo, double hi,
                       const BisectionOptions& opts = {});

/// Root of a strictly decreasing f on [0, inf) with f(0) >= 0. The initial upper
/// end is 2 and is doubled until f(hi) <= 0.
double invert_decreasing_from_zero(const std::function<double(double)>& f,
                                   const BisectionOptions& opts = {});

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Globally adaptive 15-point Gauss-Kronrod integration over [a, b].
/// Refines the interval with the largest error estimate until the total error
/// is below max(abs_tol, rel_tol * |value|) or max_intervals is reached.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-12, double rel_tol = 1e-12,
                           int max_intervals = 4000);

/// Sum of integrate() over consecutive breakpoints; breakpoints must be sorted.
QuadratureResult integrate_pieces(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints, double abs_tol = 1e-12,
                                  double rel_tol = 1e-12);

/// log(exp(a) + exp(b)) with -inf handled.
double log_add_exp(double a, double b) noexcept;

/// 1 / (1 + exp(z)) without overflow.
double logistic_complement(double z) noexcept;

}  // namespace ebtest::numerics
