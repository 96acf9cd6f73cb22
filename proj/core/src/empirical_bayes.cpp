#include "ebtest/empirical_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ebtest/errors.hpp"
#include "ebtest/numerics.hpp"
#include "ebtest/slab_model.hpp"

namespace ebtest {

namespace {

// w = 1 is admitted because the weight estimate can sit on its upper boundary.
void require_weight(double w, const char* what) {
  if (!(w > 0.0 && w <= 1.0)) {
    throw DomainError(std::string(what) + ": w must lie in (0, 1], got " + std::to_string(w));
  }
}

double clamp_posterior(double v) { return std::clamp(v, kPosteriorFloor, kPosteriorCeil); }

double log_odds(double w) { return std::log(w) - std::log1p(-w); }

// Score with beta values precomputed; infinite beta contributes exactly 1/w.
double score_from_betas(std::span<const double> betas, double w) {
  numerics::CompensatedSum acc;
  for (double b : betas) acc.add(std::isinf(b) ? 1.0 / w : b / (1.0 + w * b));
  return acc.value();
}

}  // namespace

Observations::Observations(std::vector<double> x) : x_(std::move(x)) {
  if (x_.empty()) throw InputError("observations: need at least one value");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i])) {
      throw InputError("observations: non-finite value at index " + std::to_string(i));
    }
  }
}

double log_likelihood(const Observations& data, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("log_likelihood: w must lie in [0, 1]");
  const double log_null = std::log1p(-w);
  const double log_slab = std::log(w);
  numerics::CompensatedSum acc;
  for (double x : data.values()) {
    acc.add(numerics::log_add_exp(log_null + log_phi(x), log_slab + log_g(x)));
  }
  return acc.value();
}

double score(const Observations& data, double w) {
  if (!(w > 0.0 && w <= 1.0)) throw DomainError("score: w must lie in (0, 1]");
  numerics::CompensatedSum acc;
  for (double x : data.values()) acc.add(score_kernel(x, w));
  return acc.value();
}

WeightEstimate estimate_w(const Observations& data) {
  std::vector<double> betas(data.size());
  std::transform(data.values().begin(), data.values().end(), betas.begin(),
                 [](double x) { return beta(x); });

  const double lower = 1.0 / static_cast<double>(data.size());
  WeightEstimate out;

  const double s_lower = score_from_betas(betas, lower);
  if (s_lower <= 0.0) {
    out.w_hat = lower;
    out.at_lower_boundary = true;
    out.score_at_w_hat = s_lower;
    return out;
  }
  const double s_upper = score_from_betas(betas, 1.0);
  if (s_upper >= 0.0) {
    out.w_hat = 1.0;
    out.at_upper_boundary = true;
    out.score_at_w_hat = s_upper;
    return out;
  }

  const auto root = numerics::bisect([&](double w) { return score_from_betas(betas, w); },
                                     lower, 1.0, {kWeightTolerance, 0.0, 200});
  out.w_hat = root.root;
  out.iterations = root.iterations;
  out.score_at_w_hat = score_from_betas(betas, out.w_hat);
  return out;
}

double ell_value(double x, double w) {
  require_weight(w, "ell_value");
  return clamp_posterior(numerics::logistic_complement(log_odds(w) + log_g_over_phi(x)));
}

double q_value(double x, double w) {
  require_weight(w, "q_value");
  return clamp_posterior(numerics::logistic_complement(log_odds(w) - log_tail_ratio(x)));
}

std::vector<double> ell_values(const Observations& data, double w) {
  require_weight(w, "ell_values");
  const double lo = log_odds(w);
  std::vector<double> out(data.size());
  std::transform(data.values().begin(), data.values().end(), out.begin(), [lo](double x) {
    return clamp_posterior(numerics::logistic_complement(lo + log_g_over_phi(x)));
  });
  return out;
}

std::vector<double> q_values(const Observations& data, double w) {
  require_weight(w, "q_values");
  const double lo = log_odds(w);
  std::vector<double> out(data.size());
  std::transform(data.values().begin(), data.values().end(), out.begin(), [lo](double x) {
    return clamp_posterior(numerics::logistic_complement(lo - log_tail_ratio(x)));
  });
  return out;
}

PosteriorSummaries posterior_summaries(const Observations& data, double w) {
  return {ell_values(data, w), q_values(data, w), w};
}

}  // namespace ebtest
