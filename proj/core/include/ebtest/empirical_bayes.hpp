#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ebtest {

/// The observed sequence X_1..X_n. Non-empty, all entries finite.
class Observations {
 public:
  /// Throws InputError if `x` is empty or contains a non-finite value.
  explicit Observations(std::vector<double> x);

  [[nodiscard]] std::size_t size() const noexcept { return x_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return x_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return x_[i]; }

 private:
  std::vector<double> x_;
};

/// Maximum marginal likelihood estimate of the slab weight over [1/n, 1].
struct WeightEstimate {
  double w_hat = 0.0;
  bool at_lower_boundary = false;
  bool at_upper_boundary = false;
  double score_at_w_hat = 0.0;
  int iterations = 0;
};

struct PosteriorSummaries {
  std::vector<double> ell;
  std::vector<double> q;
  double w_used = 0.0;
};

/// Lower and upper clamp applied to every l-value and q-value.
inline constexpr double kPosteriorFloor = 1e-300;
inline constexpr double kPosteriorCeil = 1.0 - 1e-16;

/// Bisection tolerance (interval width) on w for estimate_w.
inline constexpr double kWeightTolerance = 1e-10;

/// sum_i log((1 - w) phi(X_i) + w g(X_i)), each term in log space. w in [0, 1].
double log_likelihood(const Observations& data, double w);

/// S(w) = sum_i beta(X_i) / (1 + w beta(X_i)), the derivative of log_likelihood.
double score(const Observations& data, double w);

/// Root of the score on [1/n, 1]; boundary decided by the score sign at the ends.
WeightEstimate estimate_w(const Observations& data);

/// l(x; w) = (1 - w) phi(x) / ((1 - w) phi(x) + w g(x)).
double ell_value(double x, double w);
/// q(x; w) = (1 - w) phi_bar(|x|) / ((1 - w) phi_bar(|x|) + w g_bar(|x|)).
double q_value(double x, double w);

std::vector<double> ell_values(const Observations& data, double w);
std::vector<double> q_values(const Observations& data, double w);

/// Both vectors at the same w.
PosteriorSummaries posterior_summaries(const Observations& data, double w);

}  // namespace ebtest
