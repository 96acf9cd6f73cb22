#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ebtest/procedures.hpp"
#include "ebtest/theory.hpp"

namespace ebtest {

enum class SignMode : std::uint8_t { all_positive, random_sign };

std::string_view to_string(SignMode mode) noexcept;
/// "all_positive" or "random_sign"; throws InputError otherwise.
SignMode parse_sign_mode(std::string_view name);

/// s_n signals of magnitude sqrt(2 log(n/s_n)) + v_n + magnitude_surplus.
struct SignalConfig {
  std::size_t n = 0;
  std::size_t s_n = 0;
  double v_n = 0.0;
  SignMode sign_mode = SignMode::all_positive;
  double magnitude_surplus = 0.0;

  /// Throws InputError unless 1 <= s_n < n, v_n >= 0 and magnitude_surplus >= 0.
  void validate() const;
  [[nodiscard]] double boundary_magnitude() const;
  [[nodiscard]] double magnitude() const { return boundary_magnitude() + magnitude_surplus; }
};

/// Support = the first s_n positions of a seeded random permutation of 0..n-1.
std::vector<double> generate_theta0(const SignalConfig& config, std::uint64_t seed);

/// X = theta0 + standard normal noise drawn from Rng(seed).
std::vector<double> simulate_data(std::span<const double> theta0, std::uint64_t seed);

struct ProcedureOutcome {
  bool present = false;
  double fdp = 0.0;
  double fnp = 0.0;
  std::size_t rejections = 0;
  std::size_t false_pos = 0;
  std::size_t true_pos = 0;
  std::size_t false_neg = 0;
};

struct ReplicateOutcome {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::array<ProcedureOutcome, 3> procedures{};  // indexed by ProcedureTag
  double w_hat = 0.0;
  bool w_at_boundary = false;
  /// Threshold of the cumulative procedure; NaN when cl was not run.
  double lambda_hat = 0.0;
  std::size_t k_hat = 0;
  bool cl_tie = false;
  /// Posterior FDR of the cl decision; at most t by construction.
  double cl_post_fdr = 0.0;
  /// ell rejections are a subset of cl rejections (checked when both ran).
  bool ell_within_cl = true;

  bool has_bands = false;
  /// #{i in S0 : l(X_i; w-) > delta_n}
  std::size_t K_n_proxy = 0;
  bool in_w_band = false;
  bool in_lambda_band = false;

  [[nodiscard]] const ProcedureOutcome& outcome(ProcedureTag tag) const {
    return procedures[static_cast<std::size_t>(tag)];
  }
};

/// One replicate: draw data, estimate w, run the requested procedures. The
/// q-value decision uses the equivalent |X| > chi(r(w, t)) form. With `theory`
/// the concentration flags and K_n proxy are filled in.
ReplicateOutcome simulate_replicate(const SignalConfig& config, std::span<const double> theta0,
                                    double t, std::uint64_t seed,
                                    const TheoryReport* theory = nullptr,
                                    ProcedureSet procedures = ProcedureSet::all());

struct ProcedureSummary {
  ProcedureTag tag = ProcedureTag::cl;
  double fdr = 0.0;
  double fdr_se = 0.0;
  double fnr = 0.0;
  double fnr_se = 0.0;
  double mean_rejections = 0.0;
  double mean_false_pos = 0.0;
  double mean_true_pos = 0.0;
  std::size_t max_rejections = 0;
  /// max_rejections / s_n
  double max_rejection_ratio = 0.0;
};

struct SimulationReport {
  SignalConfig config;
  double t = 0.0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  ProcedureSet procedures;
  std::vector<ProcedureSummary> summaries;
  double mean_w_hat = 0.0;
  double mean_lambda_hat = 0.0;
  std::size_t cl_ties = 0;

  bool has_bands = false;
  std::optional<TheoryReport> theory;
  double frac_w_in_band = 0.0;
  double frac_lambda_in_band = 0.0;
  double mean_K_n_ratio = 0.0;

  std::vector<ReplicateOutcome> outcomes;
  /// Wall-clock time; the only field that depends on the machine.
  double runtime_seconds = 0.0;

  [[nodiscard]] const ProcedureSummary* summary(ProcedureTag tag) const;
};

struct ExperimentOptions {
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  /// 0 means one thread per hardware core.
  unsigned threads = 0;
  ProcedureSet procedures = ProcedureSet::all();
  /// Solve for the theory bands and record concentration flags.
  bool bands = false;
  double alpha = 2.0;
  /// Constant of the lambda equations; NaN means 4t.
  double A = std::numeric_limits<double>::quiet_NaN();
};

/// theta0 comes from substream 0 of the master seed and replicate i uses
/// substream i + 1. Outcomes are folded in replicate order, so the report does
/// not depend on the thread count.
SimulationReport run_experiment(const SignalConfig& config, double t,
                                const ExperimentOptions& options);

/// Mean FDP of the fixed-w l-value procedure when each coordinate is null with
/// probability 1 - w (X ~ phi) and otherwise drawn from g by inverting G_bar.
/// t = 0 gives 0.
double bfdr_estimate(double w, std::size_t n, double t, std::size_t replicates,
                     std::uint64_t seed);

struct SparsityCheck {
  ProcedureTag tag = ProcedureTag::cl;
  double A_n = 2.0;
  /// Fraction of replicates with more than A_n * s_n rejections.
  double fraction_exceeding = 0.0;
  double max_rejection_ratio = 0.0;
  /// fraction_exceeding <= 0.01
  bool pass = false;
};

SparsityCheck sparsity_preservation_check(const SimulationReport& report, double A_n,
                                          ProcedureTag tag = ProcedureTag::cl);

}  // namespace ebtest
