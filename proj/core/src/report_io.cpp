#include "ebtest/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "ebtest/errors.hpp"

namespace ebtest {

namespace {

using nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

// nlohmann writes NaN as null already; infinities are mapped the same way.
ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json decision_json(const Decision& d) {
  ordered_json j;
  j["procedure"] = to_string(d.procedure_tag);
  j["lambda_used"] = num(d.lambda_used);
  j["k_hat"] = d.k_hat;
  j["w_used"] = num(d.w_used);
  if (d.procedure_tag == ProcedureTag::cl) j["tie_at_threshold"] = d.tie_at_threshold;
  std::vector<std::size_t> rejected;
  for (std::size_t i = 0; i < d.reject.size(); ++i) {
    if (d.reject[i]) rejected.push_back(i);
  }
  j["rejected_indices"] = rejected;
  return j;
}

ordered_json rates_json(const RateSequences& r) {
  return {{"nu_n", num(r.nu_n)},
          {"delta_n", num(r.delta_n)},
          {"eps_n", num(r.eps_n)},
          {"rho_n", num(r.rho_n)}};
}

ordered_json regime_json(const ProblemRegime& r) {
  return {{"n", r.n}, {"s_n", r.s_n}, {"v_n", num(r.v_n)},
          {"t", num(r.t)}, {"alpha", num(r.alpha)}, {"A", num(r.A)}};
}

ordered_json theory_json(const TheoryReport& rep) {
  ordered_json j;
  j["regime"] = regime_json(rep.regime);
  j["rates"] = rates_json(rep.rates);
  const auto& q = rep.quantities;
  j["quantities"] = {{"w_minus", num(q.w_minus)},
                     {"w_plus", num(q.w_plus)},
                     {"lambda_minus", num(q.lambda_minus)},
                     {"lambda_plus", num(q.lambda_plus)},
                     {"lambda_minus_at_floor", q.lambda_minus_at_floor},
                     {"F_wm_at_lp", num(q.F_wm_at_lp)},
                     {"cond_exp_plus", num(q.cond_exp_plus)},
                     {"cond_exp_minus", num(q.cond_exp_minus)}};
  j["checks"] = ordered_json::object();
  j["checks"]["ev_ratio_excess"] = num(rep.ev_ratio_excess);
  j["checks"]["ev_ratio_scaled"] = num(rep.ev_ratio_scaled);
  j["checks"]["expected_fp_q_minus"] =
      rep.expected_fp_q_minus >= 0.0 ? num(rep.expected_fp_q_minus) : ordered_json(nullptr);
  j["checks"]["expected_fp_q_plus"] =
      rep.expected_fp_q_plus >= 0.0 ? num(rep.expected_fp_q_plus) : ordered_json(nullptr);
  if (rep.has_qvalue_check) {
    const auto& c = rep.qvalue_check;
    j["checks"]["qvalue_bracket"] = {{"w", num(c.w)},
                                     {"t", num(c.t)},
                                     {"ratio", num(c.ratio)},
                                     {"scaled_ratio", num(c.scaled_ratio)},
                                     {"within_bracket", c.within_bracket}};
  } else {
    j["checks"]["qvalue_bracket"] = nullptr;
  }
  j["warnings"] = rep.warnings;
  return j;
}

}  // namespace

OutputFormat parse_format(std::string_view name) {
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  throw InputError("unknown format '" + std::string(name) + "' (expected json or csv)");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Observations read_observations(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = trim(line);
    if (s.empty()) continue;
    std::string_view body = s;
    if (body.front() == '+') body.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(body.data(), body.data() + body.size(), v);
    if (res.ec != std::errc() || res.ptr != body.data() + body.size()) {
      throw InputError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(s) +
                       "' as a real number");
    }
    if (!std::isfinite(v)) {
      throw InputError("line " + std::to_string(line_no) + ": value '" + std::string(s) +
                       "' is not finite");
    }
    values.push_back(v);
  }
  if (values.empty()) throw InputError("input contains no observations");
  return Observations(std::move(values));
}

Observations read_observations(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_observations(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_observations(std::ostream& out, std::span<const double> x) {
  for (double v : x) out << format_double(v) << '\n';
}

std::map<std::string, std::string> parse_key_value(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(s.substr(0, eq)));
    const std::string value(trim(s.substr(eq + 1)));
    if (key.empty()) throw InputError("config line " + std::to_string(line_no) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw InputError("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");
    }
  }
  return out;
}

std::map<std::string, std::string> parse_key_value(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_key_value(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_analysis(std::ostream& out, const Observations& data, const AnalysisResult& result,
                    OutputFormat format) {
  const auto& ell = result.posterior.ell;
  const auto& q = result.posterior.q;
  if (format == OutputFormat::json) {
    ordered_json j;
    j["n"] = data.size();
    j["t"] = num(result.t);
    j["w_hat"] = num(result.weight.w_hat);
    j["w_at_lower_boundary"] = result.weight.at_lower_boundary;
    j["w_at_upper_boundary"] = result.weight.at_upper_boundary;
    j["score_at_w_hat"] = num(result.weight.score_at_w_hat);
    j["w_iterations"] = result.weight.iterations;
    if (result.cl) {
      j["lambda_hat"] = num(result.cl->lambda_used);
      j["k_hat"] = result.cl->k_hat;
    }
    ordered_json procs = ordered_json::object();
    for (ProcedureTag tag : kAllProcedures) {
      if (const auto& d = result.decision(tag)) procs[std::string(to_string(tag))] = decision_json(*d);
    }
    j["procedures"] = procs;
    ordered_json ell_j = ordered_json::array();
    for (double v : ell) ell_j.push_back(num(v));
    j["ell"] = ell_j;
    if (!q.empty()) {
      ordered_json q_j = ordered_json::array();
      for (double v : q) q_j.push_back(num(v));
      j["q"] = q_j;
    }
    out << j.dump(2) << '\n';
    return;
  }

  out << "# n=" << data.size() << '\n';
  out << "# t=" << format_double(result.t) << '\n';
  out << "# w_hat=" << format_double(result.weight.w_hat) << '\n';
  if (result.cl) {
    out << "# lambda_hat=" << format_double(result.cl->lambda_used) << '\n';
    out << "# k_hat=" << result.cl->k_hat << '\n';
  }
  out << "index,x,ell";
  if (!q.empty()) out << ",q";
  for (ProcedureTag tag : kAllProcedures) {
    if (result.decision(tag)) out << ",reject_" << to_string(tag);
  }
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << i << ',' << format_double(data[i]) << ',' << format_double(ell[i]);
    if (!q.empty()) out << ',' << format_double(q[i]);
    for (ProcedureTag tag : kAllProcedures) {
      if (const auto& d = result.decision(tag)) out << ',' << static_cast<int>(d->reject[i]);
    }
    out << '\n';
  }
}

void write_simulation(std::ostream& out, const SimulationReport& report, OutputFormat format) {
  const auto tags = report.procedures.tags();
  if (format == OutputFormat::csv) {
    out << "index,seed,w_hat,lambda_hat,k_hat";
    for (ProcedureTag tag : tags) {
      const auto p = to_string(tag);
      out << ',' << p << "_fdp," << p << "_fnp," << p << "_rejections," << p << "_false_pos";
    }
    if (report.has_bands) out << ",in_w_band,in_lambda_band,K_n_proxy";
    out << '\n';
    for (const auto& o : report.outcomes) {
      out << o.index << ',' << o.seed << ',' << format_double(o.w_hat) << ','
          << format_double(o.lambda_hat) << ',' << o.k_hat;
      for (ProcedureTag tag : tags) {
        const auto& p = o.outcome(tag);
        out << ',' << format_double(p.fdp) << ',' << format_double(p.fnp) << ',' << p.rejections
            << ',' << p.false_pos;
      }
      if (report.has_bands) {
        out << ',' << (o.in_w_band ? 1 : 0) << ',' << (o.in_lambda_band ? 1 : 0) << ','
            << o.K_n_proxy;
      }
      out << '\n';
    }
    return;
  }

  ordered_json j;
  j["config"] = {{"n", report.config.n},
                 {"s_n", report.config.s_n},
                 {"v_n", num(report.config.v_n)},
                 {"sign_mode", to_string(report.config.sign_mode)},
                 {"magnitude_surplus", num(report.config.magnitude_surplus)},
                 {"t", num(report.t)},
                 {"replicates", report.replicates},
                 {"seed", report.seed}};
  std::vector<std::string> names;
  for (ProcedureTag tag : tags) names.emplace_back(to_string(tag));
  j["config"]["procedures"] = names;

  ordered_json summaries = ordered_json::object();
  for (const auto& s : report.summaries) {
    summaries[std::string(to_string(s.tag))] = {{"fdr", num(s.fdr)},
                                                {"fdr_se", num(s.fdr_se)},
                                                {"fnr", num(s.fnr)},
                                                {"fnr_se", num(s.fnr_se)},
                                                {"mean_rejections", num(s.mean_rejections)},
                                                {"mean_false_pos", num(s.mean_false_pos)},
                                                {"mean_true_pos", num(s.mean_true_pos)},
                                                {"max_rejections", s.max_rejections},
                                                {"max_rejection_ratio", num(s.max_rejection_ratio)},
                                                {"replicates", report.replicates}};
  }
  j["summaries"] = summaries;
  j["mean_w_hat"] = num(report.mean_w_hat);
  j["mean_lambda_hat"] = num(report.mean_lambda_hat);
  j["cl_ties"] = report.cl_ties;
  if (report.has_bands && report.theory) {
    j["bands"] = {{"w_minus", num(report.theory->quantities.w_minus)},
                  {"w_plus", num(report.theory->quantities.w_plus)},
                  {"lambda_minus", num(report.theory->quantities.lambda_minus)},
                  {"lambda_plus", num(report.theory->quantities.lambda_plus)},
                  {"frac_w_in_band", num(report.frac_w_in_band)},
                  {"frac_lambda_in_band", num(report.frac_lambda_in_band)},
                  {"mean_K_n_ratio", num(report.mean_K_n_ratio)}};
    j["theory"] = theory_json(*report.theory);
  }
  ordered_json reps = ordered_json::array();
  for (const auto& o : report.outcomes) {
    ordered_json r;
    r["index"] = o.index;
    r["seed"] = o.seed;
    r["w_hat"] = num(o.w_hat);
    r["lambda_hat"] = num(o.lambda_hat);
    r["k_hat"] = o.k_hat;
    for (ProcedureTag tag : tags) {
      const auto& p = o.outcome(tag);
      r[std::string(to_string(tag))] = {{"fdp", num(p.fdp)},
                                        {"fnp", num(p.fnp)},
                                        {"rejections", p.rejections},
                                        {"false_pos", p.false_pos},
                                        {"false_neg", p.false_neg}};
    }
    if (o.has_bands) {
      r["in_w_band"] = o.in_w_band;
      r["in_lambda_band"] = o.in_lambda_band;
      r["K_n_proxy"] = o.K_n_proxy;
    }
    reps.push_back(std::move(r));
  }
  j["replicates"] = std::move(reps);
  j["runtime_seconds"] = num(report.runtime_seconds);
  out << j.dump(2) << '\n';
}

void write_theory(std::ostream& out, const TheoryReport& report, OutputFormat format) {
  const ordered_json j = theory_json(report);
  if (format == OutputFormat::json) {
    out << j.dump(2) << '\n';
    return;
  }
  out << "key,value\n";
  for (const char* section : {"regime", "rates", "quantities", "checks"}) {
    for (const auto& [key, value] : j[section].items()) {
      if (value.is_object()) {
        for (const auto& [sub, v] : value.items()) {
          out << section << '.' << key << '.' << sub << ',' << v.dump() << '\n';
        }
      } else {
        out << section << '.' << key << ',' << value.dump() << '\n';
      }
    }
  }
}

}  // namespace ebtest
