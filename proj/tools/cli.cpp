#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ebtest/errors.hpp"
#include "ebtest/procedures.hpp"
#include "ebtest/random.hpp"
#include "ebtest/report_io.hpp"
#include "ebtest/simulation.hpp"
#include "ebtest/theory.hpp"

namespace ebtest::cli {

namespace {

struct AnalyzeArgs {
  std::string input;
  double t = 0.1;
  std::string format = "json";
  std::string out;
  std::string procedures = "ell,cl,qval";
};

struct SimulateArgs {
  std::string config;
  std::size_t n = 0;
  std::size_t s = 0;
  double v = 0.0;
  double t = 0.1;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  std::string procedures = "ell,cl,qval";
  unsigned threads = 0;
  std::string sign_mode = "all_positive";
  double surplus = 0.0;
  bool bands = false;
  double alpha = 2.0;
  double A = 0.0;
  std::string format = "json";
  std::string out;
  std::string dump_data;
};

struct TheoryArgs {
  std::size_t n = 0;
  std::size_t s = 0;
  double v = 0.0;
  double t = 0.1;
  double alpha = 2.0;
  double A = 0.0;
  std::string format = "json";
  std::string out;
};

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  if (!CLI::detail::lexical_cast(text, value)) {
    throw InputError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

// Writes to --out when given, otherwise to the default stream.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw InputError("cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw InputError("failed writing '" + path + "'");
}

unsigned threads_from_env() {
  const char* env = std::getenv("EBTEST_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  unsigned v = 0;
  if (!CLI::detail::lexical_cast(std::string(env), v)) {
    throw InputError("EBTEST_THREADS must be a non-negative integer, got '" + std::string(env) +
                     "'");
  }
  return v;
}

int run_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const OutputFormat format = parse_format(a.format);
  const ProcedureSet procs = ProcedureSet::parse(a.procedures);
  const Observations data = read_observations(std::filesystem::path(a.input));
  const AnalysisResult result = analyze(data, a.t, procs);
  emit(a.out, out, [&](std::ostream& os) { write_analysis(os, data, result, format); });
  return kExitOk;
}

void apply_config(SimulateArgs& a, const CLI::App& sub) {
  const auto cfg = parse_key_value(std::filesystem::path(a.config));
  const auto given = [&sub](const char* flag) { return sub.count(flag) > 0; };
  for (const auto& [key, value] : cfg) {
    if (key == "n") {
      if (!given("--n")) a.n = parse_number<std::size_t>(key, value);
    } else if (key == "s_n") {
      if (!given("--s")) a.s = parse_number<std::size_t>(key, value);
    } else if (key == "v_n") {
      if (!given("--v")) a.v = parse_number<double>(key, value);
    } else if (key == "t") {
      if (!given("--t")) a.t = parse_number<double>(key, value);
    } else if (key == "sign_mode") {
      if (!given("--sign-mode")) a.sign_mode = value;
    } else if (key == "magnitude_surplus") {
      if (!given("--surplus")) a.surplus = parse_number<double>(key, value);
    } else if (key == "replicates") {
      if (!given("--reps")) a.reps = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
      if (!given("--seed")) a.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "alpha") {
      if (!given("--alpha")) a.alpha = parse_number<double>(key, value);
    } else if (key == "A") {
      if (!given("--A")) a.A = parse_number<double>(key, value);
    } else if (key == "procedures") {
      if (!given("--procedures")) a.procedures = value;
    } else {
      throw InputError("config: unknown key '" + key + "'");
    }
  }
}

int run_simulate(SimulateArgs a, const CLI::App& sub, std::ostream& out) {
  if (!a.config.empty()) apply_config(a, sub);
  const OutputFormat format = parse_format(a.format);
  if (a.n == 0 || a.s == 0) throw InputError("simulate: --n and --s are required");
  if (a.reps == 0) throw InputError("simulate: --reps must be at least 1");
  if (!(a.t > 0.0 && a.t < 1.0)) throw InputError("simulate: --t must lie in (0, 1)");

  SignalConfig config;
  config.n = a.n;
  config.s_n = a.s;
  config.v_n = a.v;
  config.sign_mode = parse_sign_mode(a.sign_mode);
  config.magnitude_surplus = a.surplus;
  config.validate();

  ExperimentOptions opts;
  opts.replicates = a.reps;
  opts.seed = a.seed;
  opts.threads = sub.count("--threads") > 0 ? a.threads : threads_from_env();
  opts.procedures = ProcedureSet::parse(a.procedures);
  opts.bands = a.bands;
  opts.alpha = a.alpha;
  if (a.A > 0.0) opts.A = a.A;

  if (!a.dump_data.empty()) {
    const auto theta0 = generate_theta0(config, substream_seed(a.seed, 0));
    const auto x = simulate_data(theta0, substream_seed(a.seed, 1));
    emit(a.dump_data, out, [&](std::ostream& os) { write_observations(os, x); });
  }
  const SimulationReport report = run_experiment(config, a.t, opts);
  emit(a.out, out, [&](std::ostream& os) { write_simulation(os, report, format); });
  return kExitOk;
}

int run_theory(const TheoryArgs& a, std::ostream& out, std::ostream& err) {
  const OutputFormat format = parse_format(a.format);
  ProblemRegime regime = ProblemRegime::with_defaults(a.n, a.s, a.v, a.t);
  regime.alpha = a.alpha;
  if (a.A > 0.0) regime.A = a.A;
  regime.validate();
  const TheoryReport report = theory_report(regime);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  emit(a.out, out, [&](std::ostream& os) { write_theory(os, report, format); });
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Empirical Bayes multiple testing with l-values, cumulative l-values and q-values"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Estimate w and run the procedures on a data file");
  analyze_cmd->add_option("--input", an.input, "File with one observation per line")->required();
  analyze_cmd->add_option("--t", an.t, "Target level in (0, 1)")->capture_default_str();
  analyze_cmd->add_option("--procedures", an.procedures, "Comma-separated subset of ell,cl,qval")
      ->capture_default_str();
  analyze_cmd->add_option("--format", an.format, "json or csv")->capture_default_str();
  analyze_cmd->add_option("--out", an.out, "Output path (default: standard output)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo FDR/FNR experiment");
  sim_cmd->add_option("--config", sim.config, "key = value file; flags override its entries");
  sim_cmd->add_option("--n", sim.n, "Number of coordinates");
  sim_cmd->add_option("--s", sim.s, "Number of signals");
  sim_cmd->add_option("--v", sim.v, "Signal margin above sqrt(2 log(n/s))");
  sim_cmd->add_option("--t", sim.t, "Target level in (0, 1)")->capture_default_str();
  sim_cmd->add_option("--reps", sim.reps, "Replicates")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  sim_cmd->add_option("--procedures", sim.procedures, "Comma-separated subset of ell,cl,qval")
      ->capture_default_str();
  sim_cmd->add_option("--threads", sim.threads,
                      "Worker threads (default: EBTEST_THREADS, else all cores)");
  sim_cmd->add_option("--sign-mode", sim.sign_mode, "all_positive or random_sign")
      ->capture_default_str();
  sim_cmd->add_option("--surplus", sim.surplus, "Extra signal magnitude above the boundary")
      ->capture_default_str();
  sim_cmd->add_flag("--bands", sim.bands, "Solve for w+-, lambda+- and record concentration");
  sim_cmd->add_option("--alpha", sim.alpha, "Constant of nu_n")->capture_default_str();
  sim_cmd->add_option("--A", sim.A, "Constant of the lambda equations (default 4t)");
  sim_cmd->add_option("--format", sim.format, "json or csv")->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Output path (default: standard output)");
  sim_cmd->add_option("--dump-data", sim.dump_data, "Write the data of replicate 0 to this path");

  TheoryArgs th;
  auto* theory_cmd = app.add_subcommand("theory", "Deterministic bands and rate sequences");
  theory_cmd->add_option("--n", th.n, "Number of coordinates")->required();
  theory_cmd->add_option("--s", th.s, "Number of signals")->required();
  theory_cmd->add_option("--v", th.v, "Signal margin above sqrt(2 log(n/s))")->required();
  theory_cmd->add_option("--t", th.t, "Target level in (0, 1)")->capture_default_str();
  theory_cmd->add_option("--alpha", th.alpha, "Constant of nu_n")->capture_default_str();
  theory_cmd->add_option("--A", th.A, "Constant of the lambda equations (default 4t)");
  theory_cmd->add_option("--format", th.format, "json or csv")->capture_default_str();
  theory_cmd->add_option("--out", th.out, "Output path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (analyze_cmd->parsed()) return run_analyze(an, out);
    if (sim_cmd->parsed()) return run_simulate(sim, *sim_cmd, out);
    return run_theory(th, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ebtest::cli
