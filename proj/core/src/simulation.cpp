#include "ebtest/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "ebtest/errors.hpp"
#include "ebtest/numerics.hpp"
#include "ebtest/random.hpp"
#include "ebtest/slab_model.hpp"

namespace ebtest {

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& v) {
  MeanSe out;
  if (v.empty()) return out;
  numerics::CompensatedSum sum;
  for (double x : v) sum.add(x);
  out.mean = sum.value() / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  numerics::CompensatedSum sq;
  for (double x : v) sq.add((x - out.mean) * (x - out.mean));
  const double sd = std::sqrt(sq.value() / static_cast<double>(v.size() - 1));
  out.se = sd / std::sqrt(static_cast<double>(v.size()));
  return out;
}

ProcedureOutcome score_decision(const RejectMask& reject, std::span<const double> theta0,
                                std::size_t s_n) {
  ProcedureOutcome o;
  o.present = true;
  for (std::size_t i = 0; i < reject.size(); ++i) {
    const bool signal = theta0[i] != 0.0;
    if (reject[i]) {
      ++o.rejections;
      if (signal) {
        ++o.true_pos;
      } else {
        ++o.false_pos;
      }
    } else if (signal) {
      ++o.false_neg;
    }
  }
  o.fdp = static_cast<double>(o.false_pos) / static_cast<double>(std::max<std::size_t>(o.rejections, 1));
  o.fnp = s_n == 0 ? 0.0 : static_cast<double>(o.false_neg) / static_cast<double>(s_n);
  return o;
}

// Draw from g: |X| solves 2 G_bar(|X|) = u.
double draw_slab(Rng& rng) {
  const double log_half_u = std::log(0.5 * rng.uniform01());
  const double magnitude = numerics::invert_decreasing_from_zero(
      [log_half_u](double x) { return log_g_bar(x) - log_half_u; }, {1e-12, 1e-14, 400});
  return rng.uniform01() < 0.5 ? -magnitude : magnitude;
}

unsigned resolve_threads(unsigned requested, std::size_t jobs) {
  unsigned n = requested == 0 ? std::max(1U, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

std::string_view to_string(SignMode mode) noexcept {
  return mode == SignMode::all_positive ? "all_positive" : "random_sign";
}

SignMode parse_sign_mode(std::string_view name) {
  if (name == "all_positive") return SignMode::all_positive;
  if (name == "random_sign") return SignMode::random_sign;
  throw InputError("unknown sign mode '" + std::string(name) +
                   "' (expected all_positive or random_sign)");
}

void SignalConfig::validate() const {
  if (s_n < 1) throw InputError("signal config: s_n must be at least 1");
  if (s_n >= n) {
    throw InputError("signal config: s_n must be smaller than n (got s_n = " +
                     std::to_string(s_n) + ", n = " + std::to_string(n) + ")");
  }
  if (!(v_n >= 0.0) || !std::isfinite(v_n)) throw InputError("signal config: v_n must be >= 0");
  if (!(magnitude_surplus >= 0.0) || !std::isfinite(magnitude_surplus)) {
    throw InputError("signal config: magnitude_surplus must be >= 0");
  }
}

double SignalConfig::boundary_magnitude() const {
  return std::sqrt(2.0 * std::log(static_cast<double>(n) / static_cast<double>(s_n))) + v_n;
}

std::vector<double> generate_theta0(const SignalConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  std::vector<std::size_t> perm(config.n);
  for (std::size_t i = 0; i < config.n; ++i) perm[i] = i;
  // Partial Fisher-Yates: the first s_n slots of a uniform permutation.
  for (std::size_t i = 0; i < config.s_n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(config.n - i));
    std::swap(perm[i], perm[j]);
  }
  std::vector<double> theta(config.n, 0.0);
  const double mag = config.magnitude();
  for (std::size_t i = 0; i < config.s_n; ++i) {
    double sign = 1.0;
    if (config.sign_mode == SignMode::random_sign) sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    theta[perm[i]] = sign * mag;
  }
  return theta;
}

std::vector<double> simulate_data(std::span<const double> theta0, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(theta0.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = theta0[i] + rng.normal();
  return x;
}

ReplicateOutcome simulate_replicate(const SignalConfig& config, std::span<const double> theta0,
                                    double t, std::uint64_t seed, const TheoryReport* theory,
                                    ProcedureSet procedures) {
  if (theta0.size() != config.n) throw InputError("simulate_replicate: theta0 has wrong length");
  ReplicateOutcome out;
  out.seed = seed;
  const Observations data(simulate_data(theta0, seed));
  const WeightEstimate est = estimate_w(data);
  const double w = est.w_hat;
  out.w_hat = w;
  out.w_at_boundary = est.at_lower_boundary || est.at_upper_boundary;
  const std::vector<double> ell = ell_values(data, w);

  std::optional<Decision> ell_dec;
  std::optional<Decision> cl_dec;
  if (procedures.contains(ProcedureTag::ell)) ell_dec = ell_procedure(ell, t);
  if (procedures.contains(ProcedureTag::cl) || theory != nullptr) cl_dec = cl_procedure(ell, t);

  if (ell_dec) {
    out.procedures[static_cast<std::size_t>(ProcedureTag::ell)] =
        score_decision(ell_dec->reject, theta0, config.s_n);
  }
  if (cl_dec) {
    out.lambda_hat = cl_dec->lambda_used;
    out.k_hat = cl_dec->k_hat;
    out.cl_tie = cl_dec->tie_at_threshold;
    out.cl_post_fdr = post_fdr(ell, cl_dec->reject);
    if (procedures.contains(ProcedureTag::cl)) {
      out.procedures[static_cast<std::size_t>(ProcedureTag::cl)] =
          score_decision(cl_dec->reject, theta0, config.s_n);
    }
    if (ell_dec) {
      for (std::size_t i = 0; i < ell.size(); ++i) {
        if (ell_dec->reject[i] && !cl_dec->reject[i]) {
          out.ell_within_cl = false;
          break;
        }
      }
    }
  } else {
    out.lambda_hat = std::numeric_limits<double>::quiet_NaN();
  }
  if (procedures.contains(ProcedureTag::qval)) {
    const Decision q = q_procedure_chi(data, w, t);
    out.procedures[static_cast<std::size_t>(ProcedureTag::qval)] =
        score_decision(q.reject, theta0, config.s_n);
  }

  if (theory != nullptr) {
    const TheoryQuantities& tq = theory->quantities;
    out.has_bands = true;
    out.in_w_band = w > tq.w_minus && w < tq.w_plus;
    out.in_lambda_band = out.lambda_hat >= tq.lambda_minus && out.lambda_hat <= tq.lambda_plus;
    for (std::size_t i = 0; i < theta0.size(); ++i) {
      if (theta0[i] != 0.0 && ell_value(data[i], tq.w_minus) > theory->rates.delta_n) {
        ++out.K_n_proxy;
      }
    }
  }
  return out;
}

const ProcedureSummary* SimulationReport::summary(ProcedureTag tag) const {
  for (const auto& s : summaries) {
    if (s.tag == tag) return &s;
  }
  return nullptr;
}

SimulationReport run_experiment(const SignalConfig& config, double t,
                                const ExperimentOptions& options) {
  config.validate();
  if (!(t > 0.0 && t < 1.0)) throw InputError("run_experiment: t must lie in (0, 1)");
  if (options.replicates < 1) throw InputError("run_experiment: need at least one replicate");
  if (options.procedures.empty()) throw InputError("run_experiment: no procedures selected");
  const auto start = std::chrono::steady_clock::now();

  SimulationReport report;
  report.config = config;
  report.t = t;
  report.replicates = options.replicates;
  report.seed = options.seed;
  report.procedures = options.procedures;

  const std::vector<double> theta0 = generate_theta0(config, substream_seed(options.seed, 0));
  if (options.bands) {
    ProblemRegime regime = ProblemRegime::with_defaults(config.n, config.s_n, config.v_n, t);
    regime.alpha = options.alpha;
    if (!std::isnan(options.A)) regime.A = options.A;
    std::vector<double> support;
    support.reserve(config.s_n);
    for (double v : theta0) {
      if (v != 0.0) support.push_back(v);
    }
    report.theory = theory_report(regime, support);
    report.has_bands = true;
  }
  const TheoryReport* theory = report.theory ? &*report.theory : nullptr;

  std::vector<ReplicateOutcome> outcomes(options.replicates);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= options.replicates) return;
      try {
        const std::uint64_t seed = substream_seed(options.seed, i + 1);
        outcomes[i] = simulate_replicate(config, theta0, t, seed, theory, options.procedures);
        outcomes[i].index = i;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(options.replicates);
        return;
      }
    }
  };
  const unsigned threads = resolve_threads(options.threads, options.replicates);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  const double reps = static_cast<double>(options.replicates);
  const double s = static_cast<double>(config.s_n);
  for (ProcedureTag tag : options.procedures.tags()) {
    ProcedureSummary sum;
    sum.tag = tag;
    std::vector<double> fdp;
    std::vector<double> fnp;
    numerics::CompensatedSum rej;
    numerics::CompensatedSum fp;
    numerics::CompensatedSum tp;
    for (const auto& o : outcomes) {
      const ProcedureOutcome& p = o.outcome(tag);
      fdp.push_back(p.fdp);
      fnp.push_back(p.fnp);
      rej.add(static_cast<double>(p.rejections));
      fp.add(static_cast<double>(p.false_pos));
      tp.add(static_cast<double>(p.true_pos));
      sum.max_rejections = std::max(sum.max_rejections, p.rejections);
    }
    const MeanSe f = mean_and_se(fdp);
    const MeanSe g = mean_and_se(fnp);
    sum.fdr = f.mean;
    sum.fdr_se = f.se;
    sum.fnr = g.mean;
    sum.fnr_se = g.se;
    sum.mean_rejections = rej.value() / reps;
    sum.mean_false_pos = fp.value() / reps;
    sum.mean_true_pos = tp.value() / reps;
    sum.max_rejection_ratio = static_cast<double>(sum.max_rejections) / s;
    report.summaries.push_back(sum);
  }

  numerics::CompensatedSum w_sum;
  numerics::CompensatedSum lam_sum;
  numerics::CompensatedSum kn_sum;
  std::size_t w_in = 0;
  std::size_t lam_in = 0;
  for (const auto& o : outcomes) {
    w_sum.add(o.w_hat);
    lam_sum.add(o.lambda_hat);
    report.cl_ties += o.cl_tie ? 1 : 0;
    if (o.has_bands) {
      w_in += o.in_w_band ? 1 : 0;
      lam_in += o.in_lambda_band ? 1 : 0;
      kn_sum.add(static_cast<double>(o.K_n_proxy) / s);
    }
  }
  report.mean_w_hat = w_sum.value() / reps;
  report.mean_lambda_hat = lam_sum.value() / reps;
  if (report.has_bands) {
    report.frac_w_in_band = static_cast<double>(w_in) / reps;
    report.frac_lambda_in_band = static_cast<double>(lam_in) / reps;
    report.mean_K_n_ratio = kn_sum.value() / reps;
  }
  report.outcomes = std::move(outcomes);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

double bfdr_estimate(double w, std::size_t n, double t, std::size_t replicates,
                     std::uint64_t seed) {
  if (!(w > 0.0 && w < 1.0)) throw DomainError("bfdr_estimate: w must lie in (0, 1)");
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("bfdr_estimate: t must lie in [0, 1)");
  if (n < 1 || replicates < 1) throw InputError("bfdr_estimate: n and replicates must be positive");
  if (t == 0.0) return 0.0;

  const double log_odds = std::log(w) - std::log1p(-w);
  numerics::CompensatedSum total;
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    Rng rng(substream_seed(seed, rep));
    std::size_t rejections = 0;
    std::size_t false_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool slab = rng.uniform01() < w;
      const double x = slab ? draw_slab(rng) : rng.normal();
      const double ell = numerics::logistic_complement(log_odds + log_g_over_phi(x));
      if (ell < t) {
        ++rejections;
        false_pos += slab ? 0 : 1;
      }
    }
    total.add(static_cast<double>(false_pos) /
              static_cast<double>(std::max<std::size_t>(rejections, 1)));
  }
  return total.value() / static_cast<double>(replicates);
}

SparsityCheck sparsity_preservation_check(const SimulationReport& report, double A_n,
                                          ProcedureTag tag) {
  if (!report.procedures.contains(tag)) {
    throw InputError("sparsity_preservation_check: procedure '" + std::string(to_string(tag)) +
                     "' is not in the report");
  }
  if (!(A_n > 0.0)) throw InputError("sparsity_preservation_check: A_n must be positive");
  SparsityCheck out;
  out.tag = tag;
  out.A_n = A_n;
  const double cap = A_n * static_cast<double>(report.config.s_n);
  std::size_t exceed = 0;
  std::size_t max_rej = 0;
  for (const auto& o : report.outcomes) {
    const std::size_t k = o.outcome(tag).rejections;
    exceed += static_cast<double>(k) > cap ? 1 : 0;
    max_rej = std::max(max_rej, k);
  }
  out.fraction_exceeding =
      report.outcomes.empty() ? 0.0
                              : static_cast<double>(exceed) / static_cast<double>(report.outcomes.size());
  out.max_rejection_ratio =
      static_cast<double>(max_rej) / static_cast<double>(report.config.s_n);
  out.pass = out.fraction_exceeding <= 0.01;
  return out;
}

}  // namespace ebtest
