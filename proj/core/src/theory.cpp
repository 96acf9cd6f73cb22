#include "ebtest/theory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ebtest/errors.hpp"
#include "ebtest/numerics.hpp"
#include "ebtest/slab_model.hpp"

namespace ebtest {

namespace {

constexpr double kTailSpan = 40.0;

void require_weight(double w, const char* what) {
  if (!(w > 0.0 && w <= 1.0)) {
    throw DomainError(std::string(what) + ": w must lie in (0, 1], got " + std::to_string(w));
  }
}

void require_open_unit(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) {
    throw DomainError(std::string(what) + ": argument must lie in (0, 1), got " +
                      std::to_string(v));
  }
}

std::vector<double> sorted_breaks(std::vector<double> pts, double lo, double hi) {
  std::vector<double> out{lo, hi};
  for (double p : pts) {
    if (p > lo && p < hi) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// xi(r(w, lam)), with 0 standing for "every x qualifies".
double ell_cut(double w, double lam) {
  const double ratio = r(w, lam);
  return ratio >= SlabMixtureModel::max_lr ? 0.0 : xi(ratio);
}

// (n - s) F_{w2}(lam) (E_0[l_{w1} | l_{w2} < lam] - t)
double expected_excess(const ProblemRegime& regime, double w1, double w2, double lam) {
  const double m = static_cast<double>(regime.n - regime.s_n);
  const double F = F_w(w2, lam);
  return m * F * ((1.0 - cond_ell_shortfall(w1, w2, lam)) - regime.t);
}

}  // namespace

ProblemRegime ProblemRegime::with_defaults(std::size_t n, std::size_t s_n, double v_n, double t) {
  ProblemRegime out;
  out.n = n;
  out.s_n = s_n;
  out.v_n = v_n;
  out.t = t;
  out.alpha = 2.0;
  out.A = 4.0 * t;
  return out;
}

void ProblemRegime::validate() const {
  if (s_n < 1) throw InputError("regime: s_n must be at least 1");
  if (s_n >= n) {
    throw InputError("regime: s_n must be smaller than n (got s_n = " + std::to_string(s_n) +
                     ", n = " + std::to_string(n) + ")");
  }
  if (!(t > 0.0 && t < 1.0)) throw InputError("regime: t must lie in (0, 1)");
  if (!(v_n >= 0.0) || !std::isfinite(v_n)) throw InputError("regime: v_n must be >= 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("regime: alpha must be > 0");
  if (!(A > 0.0) || !std::isfinite(A)) throw InputError("regime: A must be > 0");
}

std::vector<std::string> ProblemRegime::warnings() const {
  std::vector<std::string> out;
  const double log_n = std::log(static_cast<double>(n));
  if (static_cast<double>(s_n) < log_n * log_n * log_n) {
    out.push_back("s_n is below (log n)^3; the rate statements assume denser signals");
  }
  const double log_ratio = std::log(static_cast<double>(n) / static_cast<double>(s_n));
  if (s_n < 2 || !(log_ratio > 1.0)) {
    out.push_back("rate sequences are undefined for s_n < 2 or n / s_n <= e");
    return out;
  }
  const RateSequences rates = rate_sequences(*this);
  if (rates.rho_n > rates.delta_n) {
    out.push_back("v_n is below 3 (log log(n/s_n))^{1/2}, so rho_n exceeds delta_n");
  }
  return out;
}

double ProblemRegime::boundary_magnitude() const {
  return std::sqrt(2.0 * std::log(static_cast<double>(n) / static_cast<double>(s_n))) + v_n;
}

double RateSequences::max_nu_rho_delta() const { return std::max({nu_n, rho_n, delta_n}); }

RateSequences rate_sequences(const ProblemRegime& regime) {
  regime.validate();
  if (regime.s_n < 2) throw DomainError("rate_sequences: s_n must be at least 2");
  const double s = static_cast<double>(regime.s_n);
  const double log_ratio = std::log(static_cast<double>(regime.n) / s);
  if (!(log_ratio > 1.0)) throw DomainError("rate_sequences: n / s_n must exceed e");
  RateSequences out;
  out.nu_n = regime.alpha * std::sqrt(std::log(s) / s);
  out.delta_n = 1.0 / log_ratio;
  out.eps_n = out.delta_n * std::log(log_ratio);
  out.rho_n = std::exp(-regime.v_n * regime.v_n / 9.0);
  return out;
}

double m_tilde(double w) {
  require_weight(w, "m_tilde");
  const double z = zeta(w);
  const double breaks[] = {0.0, z, z + 20.0};
  const auto res = numerics::integrate_pieces(
      [w](double x) { return score_kernel(x, w) * phi(x); }, breaks, 1e-14, 1e-13);
  return -2.0 * res.value;
}

double m_one(double tau, double w) {
  require_weight(w, "m_one");
  tau = std::abs(tau);
  const double z = zeta(w);
  const double lo = tau - kTailSpan;
  const double hi = tau + kTailSpan;
  const auto breaks = sorted_breaks({-z, 0.0, z, tau}, lo, hi);
  const auto res = numerics::integrate_pieces(
      [tau, w](double x) { return score_kernel(x, w) * phi(x - tau); }, breaks, 1e-14, 1e-13);
  return res.value;
}

WeightBracket solve_w_pm(const ProblemRegime& regime, std::span<const double> support_values) {
  regime.validate();
  if (support_values.size() != regime.s_n) {
    throw InputError("solve_w_pm: expected " + std::to_string(regime.s_n) +
                     " support values, got " + std::to_string(support_values.size()));
  }
  std::map<double, double> multiplicity;
  for (double v : support_values) {
    if (v == 0.0 || !std::isfinite(v)) throw InputError("solve_w_pm: support values must be nonzero");
    multiplicity[std::abs(v)] += 1.0;
  }
  const RateSequences rates = rate_sequences(regime);
  const double n = static_cast<double>(regime.n);
  const double s = static_cast<double>(regime.s_n);

  const auto solve = [&](double factor) {
    const auto h = [&](double w) {
      numerics::CompensatedSum signal;
      for (const auto& [tau, count] : multiplicity) signal.add(count * m_one(tau, w));
      return signal.value() - factor * (n - s) * m_tilde(w);
    };
    const double lo = s / n;
    if (!(h(lo) > 0.0)) {
      throw SolverError("solve_w_pm: expected score equation is not positive at w = s_n / n");
    }
    double c = 1.0;
    double hi = std::min(1.0, c * lo * std::sqrt(std::log(n / s)));
    int doublings = 0;
    while (h(hi) > 0.0) {
      if (hi >= 1.0 || doublings >= 60) {
        throw SolverError("solve_w_pm: no sign change found up to w = " + std::to_string(hi));
      }
      c *= 2.0;
      hi = std::min(1.0, c * lo * std::sqrt(std::log(n / s)));
      ++doublings;
    }
    const auto root = numerics::bisect(h, lo, hi, {0.0, 1e-13, 200});
    if (!root.converged) throw SolverError("solve_w_pm: bisection did not converge");
    return root.root;
  };

  WeightBracket out;
  out.w_minus = solve(1.0 + rates.nu_n);
  out.w_plus = solve(1.0 - rates.nu_n);
  return out;
}

double F_w(double w, double lam) {
  require_open_unit(w, "F_w");
  require_open_unit(lam, "F_w");
  const double ratio = r(w, lam);
  if (ratio >= SlabMixtureModel::max_lr) return 1.0;
  return 2.0 * phi_bar(xi(ratio));
}

double cond_ell_shortfall(double w1, double w2, double lam) {
  require_open_unit(w1, "cond_ell_expectation");
  require_open_unit(w2, "cond_ell_expectation");
  require_open_unit(lam, "cond_ell_expectation");
  const double lo = ell_cut(w2, lam);
  const double mass = phi_bar(lo);
  const double log_odds = std::log(w1) - std::log1p(-w1);
  // 1 - l(x; w1) = 1 / (1 + exp(-(log_odds + log(g/phi)(x))))
  const auto integrand = [log_odds](double x) {
    return numerics::logistic_complement(-(log_odds + log_g_over_phi(x))) * phi(x);
  };
  const auto breaks = sorted_breaks({zeta(w1)}, lo, lo + kTailSpan);
  const auto res = numerics::integrate_pieces(integrand, breaks, 1e-15 * mass, 1e-13);
  return res.value / mass;
}

double cond_ell_expectation(double w1, double w2, double lam) {
  return 1.0 - cond_ell_shortfall(w1, w2, lam);
}

double lambda_plus_residual(const ProblemRegime& regime, const RateSequences& rates,
                            const WeightBracket& w, double lam) {
  const double s = static_cast<double>(regime.s_n);
  return expected_excess(regime, w.w_plus, w.w_minus, lam) -
         (regime.t * s + regime.A * s * rates.nu_n);
}

double lambda_minus_residual(const ProblemRegime& regime, const RateSequences& rates,
                             const WeightBracket& w, double lam) {
  const double s = static_cast<double>(regime.s_n);
  return expected_excess(regime, w.w_minus, w.w_plus, lam) -
         (regime.t * s - regime.A * s * rates.max_nu_rho_delta());
}

LambdaBracket solve_lambda_pm(const ProblemRegime& regime, const WeightBracket& w) {
  regime.validate();
  if (!(w.w_minus > 0.0 && w.w_minus <= w.w_plus && w.w_plus < 1.0)) {
    throw DomainError("solve_lambda_pm: need 0 < w_minus <= w_plus < 1");
  }
  const RateSequences rates = rate_sequences(regime);
  const numerics::BisectionOptions opts{1e-12, 0.0, 200};

  // Both left sides increase on [t, 1) and are negative at t for the plus
  // equation; near 1 they approach (n - s)(E_0 l - t), far above t s_n.
  const auto solve_on_branch = [&](const auto& residual, const char* name) {
    double hi = 1.0 - 1e-12;
    for (double gap = 1e-3; residual(hi) < 0.0; gap *= 1e-1) {
      if (gap < 1e-12) {
        throw SolverError(std::string(name) + ": left side stays below the target on [t, 1)");
      }
      hi = 1.0 - gap;
    }
    const auto root = numerics::bisect(residual, regime.t, hi, opts);
    if (!root.converged) throw SolverError(std::string(name) + ": bisection did not converge");
    return root.root;
  };

  const auto plus = [&](double lam) { return lambda_plus_residual(regime, rates, w, lam); };
  const auto minus = [&](double lam) { return lambda_minus_residual(regime, rates, w, lam); };

  LambdaBracket out;
  if (plus(regime.t) >= 0.0) {
    throw SolverError("solve_lambda_pm: lambda+ equation is already satisfied at lambda = t");
  }
  out.lambda_plus = solve_on_branch(plus, "solve_lambda_pm (lambda+)");
  if (minus(regime.t) >= 0.0) {
    out.lambda_minus = regime.t;
    out.lambda_minus_at_floor = true;
  } else {
    out.lambda_minus = solve_on_branch(minus, "solve_lambda_pm (lambda-)");
  }
  if (!(out.lambda_minus < out.lambda_plus)) {
    throw SolverError("solve_lambda_pm: lambda- is not below lambda+");
  }
  return out;
}

double expected_false_positives_q(const ProblemRegime& regime, double w) {
  regime.validate();
  const double ratio = r(w, regime.t);
  if (ratio > 1.0) {
    throw DomainError("expected_false_positives_q: r(w, t) = " + std::to_string(ratio) +
                      " exceeds 1");
  }
  return 2.0 * static_cast<double>(regime.n - regime.s_n) * phi_bar(chi(ratio));
}

QvalueBracketCheck check_qvalue_bracket(double w, double t) {
  if (!(w > 0.0 && w <= 1e-2)) throw DomainError("check_qvalue_bracket: w must lie in (0, 1e-2]");
  require_open_unit(t, "check_qvalue_bracket");
  const double ratio_wt = r(w, t);
  if (ratio_wt > 1.0) throw DomainError("check_qvalue_bracket: r(w, t) exceeds 1");
  QvalueBracketCheck out;
  out.w = w;
  out.t = t;
  out.ratio = 2.0 * g_bar(chi(ratio_wt)) / m_tilde(w) - 1.0;
  const double log_inv = -std::log(w);
  out.scaled_ratio = out.ratio * log_inv / std::log(log_inv);
  out.within_bracket =
      out.scaled_ratio >= kQvalueBracketLower && out.scaled_ratio <= kQvalueBracketUpper;
  return out;
}

TheoryQuantities theory_quantities(const ProblemRegime& regime,
                                   std::span<const double> support_values) {
  const WeightBracket w = solve_w_pm(regime, support_values);
  const LambdaBracket lam = solve_lambda_pm(regime, w);
  TheoryQuantities out;
  out.w_minus = w.w_minus;
  out.w_plus = w.w_plus;
  out.lambda_minus = lam.lambda_minus;
  out.lambda_plus = lam.lambda_plus;
  out.lambda_minus_at_floor = lam.lambda_minus_at_floor;
  out.F_wm_at_lp = F_w(w.w_minus, lam.lambda_plus);
  out.cond_exp_plus = cond_ell_expectation(w.w_plus, w.w_minus, lam.lambda_plus);
  out.cond_exp_minus = cond_ell_expectation(w.w_minus, w.w_plus, lam.lambda_minus);
  return out;
}

TheoryReport theory_report(const ProblemRegime& regime) {
  regime.validate();
  const std::vector<double> support(regime.s_n, regime.boundary_magnitude());
  return theory_report(regime, support);
}

TheoryReport theory_report(const ProblemRegime& regime, std::span<const double> support_values) {
  TheoryReport out;
  out.regime = regime;
  out.rates = rate_sequences(regime);
  out.warnings = regime.warnings();
  out.quantities = theory_quantities(regime, support_values);
  const auto& q = out.quantities;
  out.ev_ratio_excess = F_w(q.w_plus, q.lambda_plus) / F_w(q.w_minus, q.lambda_plus) - 1.0;
  out.ev_ratio_scaled = out.ev_ratio_excess / out.rates.max_nu_rho_delta();
  if (r(q.w_minus, regime.t) <= 1.0) {
    out.expected_fp_q_minus = expected_false_positives_q(regime, q.w_minus);
  }
  if (r(q.w_plus, regime.t) <= 1.0) {
    out.expected_fp_q_plus = expected_false_positives_q(regime, q.w_plus);
  }
  if (q.w_minus <= 1e-2 && r(q.w_minus, regime.t) <= 1.0) {
    out.has_qvalue_check = true;
    out.qvalue_check = check_qvalue_bracket(q.w_minus, regime.t);
  }
  return out;
}

}  // namespace ebtest
