#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ebtest/empirical_bayes.hpp"

namespace ebtest {

enum class ProcedureTag : std::uint8_t { ell = 0, cl = 1, qval = 2 };

inline constexpr std::array<ProcedureTag, 3> kAllProcedures = {
    ProcedureTag::ell, ProcedureTag::cl, ProcedureTag::qval};

std::string_view to_string(ProcedureTag tag) noexcept;
/// Parses "ell", "cl" or "qval". Throws InputError otherwise.
ProcedureTag parse_procedure(std::string_view name);

/// A subset of the three procedures.
class ProcedureSet {
 public:
  constexpr ProcedureSet() = default;
  static constexpr ProcedureSet all() { return ProcedureSet(0b111); }
  static constexpr ProcedureSet none() { return ProcedureSet(0); }
  /// Comma-separated list such as "cl,qval". Throws InputError on an unknown name.
  static ProcedureSet parse(std::string_view list);

  [[nodiscard]] constexpr bool contains(ProcedureTag tag) const noexcept {
    return (bits_ >> static_cast<unsigned>(tag)) & 1U;
  }
  constexpr ProcedureSet& insert(ProcedureTag tag) noexcept {
    bits_ |= static_cast<std::uint8_t>(1U << static_cast<unsigned>(tag));
    return *this;
  }
  [[nodiscard]] constexpr bool empty() const noexcept { return bits_ == 0; }
  [[nodiscard]] std::vector<ProcedureTag> tags() const;
  constexpr bool operator==(const ProcedureSet&) const = default;

 private:
  constexpr explicit ProcedureSet(std::uint8_t bits) : bits_(bits) {}
  std::uint8_t bits_ = 0b111;
};

/// One byte per hypothesis; 1 = reject.
using RejectMask = std::vector<std::uint8_t>;

struct Decision {
  RejectMask reject;
  /// Threshold on l (ell, cl) or q (qval). For ell and qval this is t; for cl it
  /// is the (K+1)-th smallest l-value, or 1 when everything is rejected.
  double lambda_used = 0.0;
  /// Number of rejections.
  std::size_t k_hat = 0;
  double w_used = 0.0;
  ProcedureTag procedure_tag = ProcedureTag::ell;
  /// Set by cl_procedure when the K-th and (K+1)-th smallest l-values coincide.
  bool tie_at_threshold = false;
};

/// Mean of the selected l-values: sum_i ell_i reject_i / max(1, sum_i reject_i).
double post_fdr(std::span<const double> ell, std::span<const std::uint8_t> reject);

/// Reject ell_i < t.
Decision ell_procedure(std::span<const double> ell, double t);

/// Cumulative l-value procedure: reject the K smallest l-values, where K is the
/// largest count whose ranked prefix mean is at most t. Ties in l are broken by
/// index; lambda_used is the (K+1)-th smallest l-value, or 1 when K = n.
Decision cl_procedure(std::span<const double> ell, double t);

/// Threshold of the cumulative procedure: sup{lambda : post_fdr(reject ell < lambda) <= t}.
double lambda_hat(std::span<const double> ell, double t);

/// Reject q_i < t.
Decision q_procedure(std::span<const double> q, double t);

/// The same decision computed as |X_i| > chi(r(w, t)); everything is rejected
/// when r(w, t) > 1 since phi_bar/g_bar never exceeds 1.
Decision q_procedure_chi(const Observations& data, double w, double t);

struct AnalysisResult {
  WeightEstimate weight;
  PosteriorSummaries posterior;
  double t = 0.0;
  std::optional<Decision> ell;
  std::optional<Decision> cl;
  std::optional<Decision> qval;

  [[nodiscard]] const std::optional<Decision>& decision(ProcedureTag tag) const;
};

/// Weight estimate, l- and q-values at w_hat, and the requested procedures.
/// q-values are only computed when qval is requested.
AnalysisResult analyze(const Observations& data, double t,
                       ProcedureSet procedures = ProcedureSet::all());

}  // namespace ebtest
