#include "ebtest/slab_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ebtest/errors.hpp"
#include "ebtest/numerics.hpp"

namespace ebtest {

namespace {

constexpr long double kSqrt2L = 1.414213562373095048801688724209698079L;
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617639;
// Below this |x| the expm1 forms are replaced by their Taylor series.
constexpr double kSeriesCutoff = 1e-4;
// Above this |x|, expm1(x^2/2) is evaluated in log space.
constexpr double kLogSpaceCutoff = 30.0;

// Mills ratio phi_bar(x)/phi(x) by backward continued fraction; accurate for x >= 10.
double mills_ratio_cf(double x) {
  double tail = x;
  for (int k = 60; k >= 1; --k) tail = x + k / tail;
  return 1.0 / tail;
}

// expm1(y)/(2y) with y = x^2/2, i.e. (g/phi)(x), for tiny |x|.
double g_over_phi_series(double x) {
  const double x2 = x * x;
  return 0.5 + x2 / 8.0 + x2 * x2 / 48.0;
}

}  // namespace

double phi(double x) noexcept {
  const long double lx = x;
  return static_cast<double>(SlabMixtureModel::phi0 * std::exp(-0.5L * lx * lx));
}

double log_phi(double x) noexcept { return -0.5 * x * x - kLogSqrt2Pi; }

double phi_bar(double x) noexcept {
  return static_cast<double>(0.5L * std::erfc(static_cast<long double>(x) / kSqrt2L));
}

double log_phi_bar(double x) noexcept {
  if (x < 100.0) {
    return static_cast<double>(
        std::log(0.5L * std::erfc(static_cast<long double>(x) / kSqrt2L)));
  }
  return log_phi(x) + std::log(mills_ratio_cf(x));
}

double g(double x) noexcept {
  const double ax = std::abs(x);
  if (ax < kSeriesCutoff) {
    const double x2 = x * x;
    return SlabMixtureModel::phi0 * (0.5 - x2 / 8.0 + x2 * x2 / 48.0);
  }
  return SlabMixtureModel::phi0 * (-std::expm1(-0.5 * x * x)) / (x * x);
}

double log_g(double x) noexcept {
  const double ax = std::abs(x);
  if (ax < kSeriesCutoff) return std::log(g(x));
  return std::log(-std::expm1(-0.5 * x * x)) - 2.0 * std::log(ax) - kLogSqrt2Pi;
}

double g_bar(double x) noexcept {
  if (x < 0.0) return 1.0 - g_bar(-x);
  if (x == 0.0) return 0.5;
  double head;
  if (x < kSeriesCutoff) {
    const double x2 = x * x;
    head = SlabMixtureModel::phi0 * x * (0.5 - x2 / 8.0);
  } else {
    head = SlabMixtureModel::phi0 * (-std::expm1(-0.5 * x * x)) / x;
  }
  return head + phi_bar(x);
}

double log_g_bar(double x) noexcept { return std::log(g_bar(x)); }

double g_over_phi(double x) noexcept {
  const double ax = std::abs(x);
  if (ax < kSeriesCutoff) return g_over_phi_series(x);
  if (ax <= kLogSpaceCutoff) return std::expm1(0.5 * x * x) / (x * x);
  return std::exp(log_g_over_phi(x));
}

double log_g_over_phi(double x) noexcept {
  const double ax = std::abs(x);
  if (ax < kSeriesCutoff) return std::log(g_over_phi_series(x));
  const double y = 0.5 * x * x;
  if (ax <= kLogSpaceCutoff) return std::log(std::expm1(y)) - 2.0 * std::log(ax);
  return y + std::log1p(-std::exp(-y)) - 2.0 * std::log(ax);
}

double phi_over_g(double x) noexcept {
  const double ax = std::abs(x);
  if (ax < kSeriesCutoff) return 1.0 / g_over_phi_series(x);
  if (ax <= kLogSpaceCutoff) return (x * x) / std::expm1(0.5 * x * x);
  return std::exp(-log_g_over_phi(x));
}

double beta(double x) noexcept { return g_over_phi(x) - 1.0; }

double score_kernel(double x, double w) noexcept {
  const double b = beta(x);
  if (std::isinf(b)) return 1.0 / w;
  return b / (1.0 + w * b);
}

double log_tail_ratio(double x) noexcept {
  const double ax = std::abs(x);
  return log_phi_bar(ax) - log_g_bar(ax);
}

double tail_ratio(double x) noexcept { return std::exp(log_tail_ratio(x)); }

double xi(double u) {
  if (!(u > 0.0)) throw DomainError("xi: argument must be positive, got " + std::to_string(u));
  if (u >= SlabMixtureModel::max_lr) return 0.0;
  const double log_u = std::log(u);
  return numerics::invert_decreasing_from_zero(
      [log_u](double x) { return -log_g_over_phi(x) - log_u; });
}

double zeta(double w) {
  if (!(w > 0.0) || w > 1.0) {
    throw DomainError("zeta: argument must lie in (0, 1], got " + std::to_string(w));
  }
  const double target = std::log1p(1.0 / w);
  return numerics::invert_decreasing_from_zero(
      [target](double x) { return target - log_g_over_phi(x); });
}

double chi(double u) {
  if (!(u > 0.0) || u > 1.0) {
    throw DomainError("chi: argument must lie in (0, 1], got " + std::to_string(u));
  }
  if (u == 1.0) return 0.0;
  const double log_u = std::log(u);
  return numerics::invert_decreasing_from_zero(
      [log_u](double x) { return log_tail_ratio(x) - log_u; });
}

double r(double w, double t) {
  if (!(w > 0.0 && w < 1.0) || !(t > 0.0 && t < 1.0)) {
    throw DomainError("r: arguments must lie in (0, 1)");
  }
  return (w * t) / ((1.0 - w) * (1.0 - t));
}

}  // namespace ebtest
