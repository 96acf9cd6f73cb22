#include "ebtest/numerics.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <queue>
#include <vector>

#include "ebtest/errors.hpp"

namespace ebtest::numerics {

double compensated_sum(std::span<const double> values) noexcept {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

BisectionResult bisect(const std::function<double(double)>& f, double lo, double hi,
                       const BisectionOptions& opts) {
  double f_lo = f(lo);
  const double f_hi = f(hi);
  BisectionResult out;
  if (f_lo == 0.0) return {lo, 0, true};
  if (f_hi == 0.0) return {hi, 0, true};
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw SolverError("bisection: endpoints do not bracket a sign change");
  }
  for (out.iterations = 0; out.iterations < opts.max_iterations; ++out.iterations) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= opts.abs_width + opts.rel_width * std::abs(mid) || mid <= lo || mid >= hi) {
      out.converged = true;
      break;
    }
    const double f_mid = f(mid);
    if (f_mid == 0.0) {
      lo = hi = mid;
      out.converged = true;
      break;
    }
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  out.root = 0.5 * (lo + hi);
  return out;
}

double invert_decreasing_from_zero(const std::function<double(double)>& f,
                                   const BisectionOptions& opts) {
  if (f(0.0) <= 0.0) return 0.0;
  double hi = 2.0;
  for (int k = 0; f(hi) > 0.0; ++k) {
    if (k > 1000) throw SolverError("invert_decreasing_from_zero: no upper bracket");
    hi *= 2.0;
  }
  return bisect(f, 0.0, hi, opts).root;
}

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_center = f(center);
  double kronrod = f_center * kWgk[7];
  double gauss = f_center * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol, int max_intervals) {
  if (a == b) return {};
  std::priority_queue<Segment> heap;
  const Segment first = gk15(f, a, b);
  heap.push(first);
  double total = first.value;
  double total_err = first.error;
  int count = 1;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_intervals) {
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;
    heap.pop();
    const Segment left = gk15(f, worst.a, mid);
    const Segment right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum from the final partition so the running update does not accumulate drift.
  CompensatedSum value;
  CompensatedSum err;
  while (!heap.empty()) {
    value.add(heap.top().value);
    err.add(heap.top().error);
    heap.pop();
  }
  return {value.value(), err.value(), count};
}

QuadratureResult integrate_pieces(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints, double abs_tol,
                                  double rel_tol) {
  QuadratureResult out;
  CompensatedSum value;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] <= breakpoints[i]) continue;
    const QuadratureResult piece =
        integrate(f, breakpoints[i], breakpoints[i + 1], abs_tol, rel_tol);
    value.add(piece.value);
    out.error += piece.error;
    out.intervals += piece.intervals;
  }
  out.value = value.value();
  return out;
}

double log_add_exp(double a, double b) noexcept {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double logistic_complement(double z) noexcept {
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

}  // namespace ebtest::numerics
