#include "ebtest/procedures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ebtest/errors.hpp"
#include "ebtest/slab_model.hpp"

namespace ebtest {

namespace {

void require_level(double t, const char* what) {
  if (!(t > 0.0 && t < 1.0)) {
    throw DomainError(std::string(what) + ": t must lie in (0, 1), got " + std::to_string(t));
  }
}

Decision threshold_below(std::span<const double> values, double t, ProcedureTag tag) {
  Decision d;
  d.reject.resize(values.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool rej = values[i] < t;
    d.reject[i] = rej ? 1 : 0;
    k += rej ? 1 : 0;
  }
  d.lambda_used = t;
  d.k_hat = k;
  d.procedure_tag = tag;
  return d;
}

struct ClCut {
  std::vector<std::size_t> order;  // the first k_hat entries are the rejected indices
  std::size_t k_hat = 0;
  double lambda = 1.0;
  bool tie = false;
};

// Only a prefix of the ranking is needed: select the m smallest, sort those, and
// scan. When the scan reaches m without the prefix mean exceeding t, m grows.
ClCut cumulative_cut(std::span<const double> ell, double t) {
  const std::size_t n = ell.size();
  ClCut cut;
  cut.order.resize(n);
  std::iota(cut.order.begin(), cut.order.end(), std::size_t{0});
  const auto less = [&ell](std::size_t a, std::size_t b) {
    return ell[a] < ell[b] || (ell[a] == ell[b] && a < b);
  };

  std::size_t m = std::min<std::size_t>(n, 1024);
  std::size_t sorted = 0;
  long double prefix = 0.0L;
  std::size_t k = 0;
  for (;;) {
    if (m < n) {
      std::nth_element(cut.order.begin() + static_cast<std::ptrdiff_t>(sorted),
                       cut.order.begin() + static_cast<std::ptrdiff_t>(m), cut.order.end(), less);
    }
    std::sort(cut.order.begin() + static_cast<std::ptrdiff_t>(sorted),
              cut.order.begin() + static_cast<std::ptrdiff_t>(m), less);
    sorted = m;
    for (; k < sorted; ++k) {
      const long double next = prefix + ell[cut.order[k]];
      if (static_cast<double>(next / static_cast<long double>(k + 1)) > t) break;
      prefix = next;
    }
    if (k < sorted || sorted == n) break;
    m = std::min(n, m * 4);
  }

  cut.k_hat = k;
  if (k < n) {
    cut.lambda = ell[cut.order[k]];
    cut.tie = k > 0 && ell[cut.order[k - 1]] == cut.lambda;
  }
  return cut;
}

}  // namespace

std::string_view to_string(ProcedureTag tag) noexcept {
  switch (tag) {
    case ProcedureTag::ell:
      return "ell";
    case ProcedureTag::cl:
      return "cl";
    case ProcedureTag::qval:
      return "qval";
  }
  return "unknown";
}

ProcedureTag parse_procedure(std::string_view name) {
  for (ProcedureTag tag : kAllProcedures) {
    if (name == to_string(tag)) return tag;
  }
  throw InputError("unknown procedure '" + std::string(name) + "' (expected ell, cl or qval)");
}

ProcedureSet ProcedureSet::parse(std::string_view list) {
  ProcedureSet out = none();
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    std::string_view item = list.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.insert(parse_procedure(item));
    start = comma + 1;
  }
  if (out.empty()) throw InputError("procedure list is empty");
  return out;
}

std::vector<ProcedureTag> ProcedureSet::tags() const {
  std::vector<ProcedureTag> out;
  for (ProcedureTag tag : kAllProcedures) {
    if (contains(tag)) out.push_back(tag);
  }
  return out;
}

double post_fdr(std::span<const double> ell, std::span<const std::uint8_t> reject) {
  if (ell.size() != reject.size()) {
    throw InputError("post_fdr: ell has " + std::to_string(ell.size()) + " entries, reject has " +
                     std::to_string(reject.size()));
  }
  long double sum = 0.0L;
  std::size_t k = 0;
  for (std::size_t i = 0; i < ell.size(); ++i) {
    if (reject[i]) {
      sum += ell[i];
      ++k;
    }
  }
  return static_cast<double>(sum / static_cast<long double>(std::max<std::size_t>(k, 1)));
}

Decision ell_procedure(std::span<const double> ell, double t) {
  require_level(t, "ell_procedure");
  return threshold_below(ell, t, ProcedureTag::ell);
}

Decision cl_procedure(std::span<const double> ell, double t) {
  require_level(t, "cl_procedure");
  const ClCut cut = cumulative_cut(ell, t);
  Decision d;
  d.reject.assign(ell.size(), 0);
  for (std::size_t j = 0; j < cut.k_hat; ++j) d.reject[cut.order[j]] = 1;
  d.lambda_used = cut.lambda;
  d.k_hat = cut.k_hat;
  d.procedure_tag = ProcedureTag::cl;
  d.tie_at_threshold = cut.tie;
  return d;
}

double lambda_hat(std::span<const double> ell, double t) {
  require_level(t, "lambda_hat");
  return cumulative_cut(ell, t).lambda;
}

Decision q_procedure(std::span<const double> q, double t) {
  require_level(t, "q_procedure");
  return threshold_below(q, t, ProcedureTag::qval);
}

Decision q_procedure_chi(const Observations& data, double w, double t) {
  require_level(t, "q_procedure_chi");
  if (!(w > 0.0 && w <= 1.0)) throw DomainError("q_procedure_chi: w must lie in (0, 1]");
  Decision d;
  d.lambda_used = t;
  d.w_used = w;
  d.procedure_tag = ProcedureTag::qval;
  const double ratio = w < 1.0 ? r(w, t) : HUGE_VAL;
  if (ratio > 1.0) {
    d.reject.assign(data.size(), 1);
    d.k_hat = data.size();
    return d;
  }
  const double cut = chi(ratio);
  d.reject.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    d.reject[i] = std::abs(data[i]) > cut ? 1 : 0;
    d.k_hat += d.reject[i];
  }
  return d;
}

const std::optional<Decision>& AnalysisResult::decision(ProcedureTag tag) const {
  switch (tag) {
    case ProcedureTag::ell:
      return ell;
    case ProcedureTag::cl:
      return cl;
    case ProcedureTag::qval:
      break;
  }
  return qval;
}

AnalysisResult analyze(const Observations& data, double t, ProcedureSet procedures) {
  require_level(t, "analyze");
  AnalysisResult out;
  out.t = t;
  out.weight = estimate_w(data);
  const double w = out.weight.w_hat;
  out.posterior.w_used = w;
  out.posterior.ell = ell_values(data, w);
  if (procedures.contains(ProcedureTag::qval)) out.posterior.q = q_values(data, w);

  if (procedures.contains(ProcedureTag::ell)) {
    out.ell = ell_procedure(out.posterior.ell, t);
    out.ell->w_used = w;
  }
  if (procedures.contains(ProcedureTag::cl)) {
    out.cl = cl_procedure(out.posterior.ell, t);
    out.cl->w_used = w;
  }
  if (procedures.contains(ProcedureTag::qval)) {
    out.qval = q_procedure(out.posterior.q, t);
    out.qval->w_used = w;
  }
  return out;
}

}  // namespace ebtest
