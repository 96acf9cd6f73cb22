#pragma once

// Scalar functions of the two-group model with a standard normal null and the
// quasi-Cauchy marginal alternative
//
//     g(x) = (2 pi)^{-1/2} x^{-2} (1 - exp(-x^2 / 2)).
//
// Everything here is pure and thread-safe.

namespace ebtest {

struct SlabMixtureModel {
  /// phi(0) = 1 / sqrt(2 pi)
  static constexpr double phi0 = 0.398942280401432677939946059934;
  /// g(0) = phi(0) / 2 (limit of g at the origin)
  static constexpr double g0 = phi0 / 2.0;
  /// sup_x (phi/g)(x), attained only at x = 0
  static constexpr double max_lr = 2.0;
};

/// Standard normal density.
double phi(double x) noexcept;
double log_phi(double x) noexcept;

/// Upper normal tail. Evaluated through an extended-precision erfc, so the
/// relative error stays near machine precision until the result leaves the
/// normal double range (x ~ 37.5). Use log_phi_bar beyond that.
double phi_bar(double x) noexcept;
double log_phi_bar(double x) noexcept;

/// Quasi-Cauchy marginal density; even, continuous at 0 with g(0) = phi(0)/2.
double g(double x) noexcept;
double log_g(double x) noexcept;

/// Upper tail of g, closed form (phi(0) - phi(x)) / x + phi_bar(x) for x > 0.
/// Negative arguments use symmetry: g_bar(-x) = 1 - g_bar(x).
double g_bar(double x) noexcept;
double log_g_bar(double x) noexcept;

/// (g/phi)(x) = expm1(x^2/2) / x^2. Returns +inf once the ratio overflows.
double g_over_phi(double x) noexcept;
double log_g_over_phi(double x) noexcept;
/// (phi/g)(x), strictly decreasing on [0, inf) from 2 to 0.
double phi_over_g(double x) noexcept;

/// beta(x) = (g/phi)(x) - 1; even, minimum -1/2 at the origin.
double beta(double x) noexcept;

/// beta(x) / (1 + w beta(x)), the per-coordinate score term. Bounded by 1/w,
/// and equal to 1/w where beta overflows.
double score_kernel(double x, double w) noexcept;

/// (phi_bar / g_bar)(x) for x >= 0; strictly decreasing from 1.
double tail_ratio(double x) noexcept;
double log_tail_ratio(double x) noexcept;

/// xi(u) = (phi/g)^{-1}(u) on (0, 2], extended by xi(u) = 0 for u >= 2.
/// Throws DomainError for u <= 0.
double xi(double u);

/// zeta(w) = beta^{-1}(1/w) for w in (0, 1]. Throws DomainError otherwise.
double zeta(double w);

/// chi(u) = (phi_bar / g_bar)^{-1}(u) for u in (0, 1]. Throws DomainError otherwise.
double chi(double u);

/// r(w, t) = w t / ((1 - w)(1 - t)); both arguments in (0, 1).
double r(double w, double t);

}  // namespace ebtest
