#pragma once

// Deterministic proxies for the random quantities of the procedures: the
// weights w- <= w+ bracketing the MLE, the thresholds lambda- < lambda+
// bracketing the cumulative-l threshold, and the rate sequences.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ebtest {

struct ProblemRegime {
  std::size_t n = 0;
  std::size_t s_n = 0;
  double v_n = 0.0;
  double t = 0.1;
  double alpha = 2.0;
  double A = 0.4;

  /// alpha = 2 and A = 4t.
  static ProblemRegime with_defaults(std::size_t n, std::size_t s_n, double v_n, double t);

  /// Throws InputError unless 1 <= s_n < n, t in (0, 1), v_n >= 0, alpha > 0, A > 0.
  void validate() const;
  /// Non-fatal remarks, e.g. s_n below (log n)^3.
  [[nodiscard]] std::vector<std::string> warnings() const;

  /// sqrt(2 log(n / s_n)) + v_n
  [[nodiscard]] double boundary_magnitude() const;
};

struct RateSequences {
  double nu_n = 0.0;
  double delta_n = 0.0;
  double eps_n = 0.0;
  double rho_n = 0.0;

  [[nodiscard]] double max_nu_rho_delta() const;
};

/// nu = alpha (log s / s)^{1/2}, delta = 1 / log(n/s), eps = delta log log(n/s),
/// rho = exp(-v^2 / 9). Throws DomainError when s_n < 2 or n/s_n <= e.
RateSequences rate_sequences(const ProblemRegime& regime);

/// m~(w) = -E_0[beta(X) / (1 + w beta(X))], w in (0, 1].
double m_tilde(double w);

/// m1(tau, w) = E_tau[beta(X) / (1 + w beta(X))], w in (0, 1]. Even in tau.
double m_one(double tau, double w);

struct WeightBracket {
  double w_minus = 0.0;
  double w_plus = 0.0;
};

/// Roots of w -> sum_i m1(theta_i, w) - (1 +/- nu)(n - s) m~(w). Support values
/// must be nonzero; only their absolute values matter. Throws SolverError when the
/// upper end of the bracket cannot be found.
WeightBracket solve_w_pm(const ProblemRegime& regime, std::span<const double> support_values);

/// P_0(l(X; w) < lam) = 2 phi_bar(xi(r(w, lam))), equal to 1 once r(w, lam) >= 2.
double F_w(double w, double lam);

/// 1 - E_0[l(X; w1) | l(X; w2) < lam], computed directly for accuracy near 1.
double cond_ell_shortfall(double w1, double w2, double lam);
/// E_0[l(X; w1) | l(X; w2) < lam].
double cond_ell_expectation(double w1, double w2, double lam);

struct LambdaBracket {
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  /// True when the right side of the lambda- equation lies below every value the
  /// left side takes on [t, 1); lambda_minus is then t, which bounds the
  /// cumulative threshold from below on every dataset.
  bool lambda_minus_at_floor = false;
};

/// Left side of the lambda+ equation minus its right side, as a function of lam.
double lambda_plus_residual(const ProblemRegime& regime, const RateSequences& rates,
                            const WeightBracket& w, double lam);
/// Same for lambda-.
double lambda_minus_residual(const ProblemRegime& regime, const RateSequences& rates,
                             const WeightBracket& w, double lam);

/// Solves the lambda+ and lambda- equations on the increasing branch [t, 1).
/// Throws SolverError if lambda+ has no root there.
LambdaBracket solve_lambda_pm(const ProblemRegime& regime, const WeightBracket& w);

/// 2 (n - s) phi_bar(chi(r(w, t))). Throws DomainError when r(w, t) > 1.
double expected_false_positives_q(const ProblemRegime& regime, double w);

/// Calibrated range for (2 G_bar(chi(r(w, t))) / m~(w) - 1) log(1/w) / log log(1/w).
inline constexpr double kQvalueBracketLower = 0.01;
inline constexpr double kQvalueBracketUpper = 1.0;

struct QvalueBracketCheck {
  double w = 0.0;
  double t = 0.0;
  /// 2 G_bar(chi(r(w, t))) / m~(w) - 1
  double ratio = 0.0;
  /// ratio * log(1/w) / log log(1/w)
  double scaled_ratio = 0.0;
  bool within_bracket = false;
};

/// Requires w in (0, 1e-2] and r(w, t) <= 1.
QvalueBracketCheck check_qvalue_bracket(double w, double t);

struct TheoryQuantities {
  double w_minus = 0.0;
  double w_plus = 0.0;
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  bool lambda_minus_at_floor = false;
  /// F_{w-}(lambda+)
  double F_wm_at_lp = 0.0;
  /// E_0[l_{w+} | l_{w-} < lambda+]
  double cond_exp_plus = 0.0;
  /// E_0[l_{w-} | l_{w+} < lambda-]
  double cond_exp_minus = 0.0;
};

TheoryQuantities theory_quantities(const ProblemRegime& regime,
                                   std::span<const double> support_values);

struct TheoryReport {
  ProblemRegime regime;
  RateSequences rates;
  TheoryQuantities quantities;
  std::vector<std::string> warnings;
  /// F_{w+}(lambda+) / F_{w-}(lambda+) - 1
  double ev_ratio_excess = 0.0;
  /// ev_ratio_excess / max(nu, rho, delta)
  double ev_ratio_scaled = 0.0;
  /// Expected q-value false positives at w- and w+; negative when r(w, t) > 1.
  double expected_fp_q_minus = -1.0;
  double expected_fp_q_plus = -1.0;
  /// Bracket check at w-, present when w- <= 1e-2 and r(w-, t) <= 1.
  bool has_qvalue_check = false;
  QvalueBracketCheck qvalue_check;
};

/// Everything above for s_n signals placed at the boundary magnitude.
TheoryReport theory_report(const ProblemRegime& regime);
TheoryReport theory_report(const ProblemRegime& regime, std::span<const double> support_values);

}  // namespace ebtest
