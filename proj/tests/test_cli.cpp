#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "ebtest/procedures.hpp"
#include "ebtest/random.hpp"
#include "ebtest/report_io.hpp"
#include "ebtest/simulation.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ebtest");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ebtest::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ebtest_cli_" + std::to_string(std::random_device{}()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& content) const {
    const auto p = dir_ / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

json strip_runtime(json j) {
  j.erase("runtime_seconds");
  return j;
}

}  // namespace

TEST_F(CliTest, AnalyzeZeros) {
  std::string zeros;
  for (int i = 0; i < 100; ++i) zeros += "0\n";
  const auto r = run({"analyze", "--input", file("z.txt", zeros), "--t", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["w_hat"].get<double>(), 0.01);
  EXPECT_TRUE(j["w_at_lower_boundary"].get<bool>());
}

TEST_F(CliTest, AnalyzeSingleLargeEntry) {
  const auto r = run({"analyze", "--input", file("one.txt", "10\n"), "--t", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  for (const char* p : {"ell", "cl", "qval"}) {
    EXPECT_EQ(j["procedures"][p]["rejected_indices"], json::array({0})) << p;
  }
}

TEST_F(CliTest, AnalyzeMalformedAndEmpty) {
  const auto bad = run({"analyze", "--input", file("bad.txt", "1.0\n2.0\nabc\n")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("line 3"), std::string::npos) << bad.err;
  EXPECT_EQ(run({"analyze", "--input", file("empty.txt", "")}).code, 2);
  EXPECT_EQ(run({"analyze", "--input", path("missing.txt")}).code, 2);
  EXPECT_EQ(run({"analyze"}).code, 2);
  EXPECT_EQ(run({"analyze", "--input", file("x.txt", "1\n"), "--t", "1.5"}).code, 2);
  EXPECT_EQ(run({"analyze", "--input", file("y.txt", "1\n"), "--format", "xml"}).code, 2);
}

TEST_F(CliTest, AnalyzeCsvToFile) {
  const auto out = path("res.csv");
  const auto r = run({"analyze", "--input", file("d.txt", "0.5\n-3\n8\n"), "--format", "csv",
                      "--out", out, "--procedures", "cl"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_NE(text.find("index,x,ell,reject_cl\n"), std::string::npos);
  EXPECT_EQ(text.find("reject_qval"), std::string::npos);
}

TEST_F(CliTest, SimulateDeterministic) {
  const std::vector<std::string> args{"simulate", "--n", "1000", "--s", "20", "--v", "5",
                                      "--t", "0.1", "--reps", "50", "--seed", "7"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(strip_runtime(json::parse(a.out)), strip_runtime(json::parse(b.out)));
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "4"});
  EXPECT_EQ(strip_runtime(json::parse(run(threaded).out)), strip_runtime(json::parse(a.out)));
  const auto csv1 = run({"simulate", "--n", "500", "--s", "10", "--v", "3", "--reps", "5", "--format", "csv"});
  const auto csv2 = run({"simulate", "--n", "500", "--s", "10", "--v", "3", "--reps", "5", "--format", "csv"});
  EXPECT_EQ(csv1.out, csv2.out);
}

TEST_F(CliTest, SimulateValidation) {
  EXPECT_EQ(run({"simulate", "--n", "1000", "--s", "20", "--v", "5", "--reps", "0"}).code, 2);
  EXPECT_EQ(run({"simulate", "--n", "100", "--s", "100", "--v", "5"}).code, 2);
  EXPECT_EQ(run({"simulate", "--n", "100"}).code, 2);
  EXPECT_EQ(run({"simulate", "--n", "100", "--s", "5", "--procedures", "bh"}).code, 2);
  EXPECT_EQ(run({"simulate", "--n", "100", "--s", "5", "--sign-mode", "up"}).code, 2);
}

TEST_F(CliTest, SimulateProcedureFilter) {
  const auto r = run({"simulate", "--n", "1000", "--s", "20", "--v", "5", "--reps", "3",
                      "--procedures", "cl,qval"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_FALSE(j["summaries"].contains("ell"));
  EXPECT_TRUE(j["summaries"].contains("cl"));
  EXPECT_TRUE(j["summaries"].contains("qval"));
  EXPECT_FALSE(j["replicates"][0].contains("ell"));
}

TEST_F(CliTest, SimulateConfigFileWithOverride) {
  const auto cfg = file("sim.cfg",
                        "# regime\nn = 1000\ns_n = 20\nv_n = 4\nt = 0.2\nreplicates = 3\nseed = 5\n"
                        "procedures = cl\nsign_mode = random_sign\n");
  const auto r = run({"simulate", "--config", cfg, "--reps", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["config"]["replicates"], 2);
  EXPECT_EQ(j["config"]["s_n"], 20);
  EXPECT_EQ(j["config"]["sign_mode"], "random_sign");
  EXPECT_DOUBLE_EQ(j["config"]["t"].get<double>(), 0.2);
  EXPECT_EQ(run({"simulate", "--config", file("bad.cfg", "n = 10\nfoo = 1\n")}).code, 2);
  EXPECT_EQ(run({"simulate", "--config", file("bad2.cfg", "n = ten\n")}).code, 2);
}

TEST_F(CliTest, ThreadsFromEnvironment) {
  ::setenv("EBTEST_THREADS", "2", 1);
  const auto a = run({"simulate", "--n", "800", "--s", "8", "--v", "3", "--reps", "6"});
  ::setenv("EBTEST_THREADS", "many", 1);
  const auto bad = run({"simulate", "--n", "800", "--s", "8", "--v", "3", "--reps", "6"});
  ::unsetenv("EBTEST_THREADS");
  const auto b = run({"simulate", "--n", "800", "--s", "8", "--v", "3", "--reps", "6"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(strip_runtime(json::parse(a.out)), strip_runtime(json::parse(b.out)));
}

TEST_F(CliTest, DumpDataRoundTripsThroughAnalyze) {
  const auto dump = path("rep0.txt");
  const auto sim = run({"simulate", "--n", "2000", "--s", "40", "--v", "3", "--reps", "2",
                        "--seed", "17", "--dump-data", dump});
  ASSERT_EQ(sim.code, 0) << sim.err;
  const auto sj = json::parse(sim.out);
  const auto ana = run({"analyze", "--input", dump, "--t", "0.1"});
  ASSERT_EQ(ana.code, 0) << ana.err;
  const auto aj = json::parse(ana.out);
  const auto& rep0 = sj["replicates"][0];
  EXPECT_EQ(aj["w_hat"].get<double>(), rep0["w_hat"].get<double>());
  EXPECT_EQ(aj["lambda_hat"].get<double>(), rep0["lambda_hat"].get<double>());
  EXPECT_EQ(aj["k_hat"], rep0["k_hat"]);
  for (const char* p : {"ell", "cl", "qval"}) {
    EXPECT_EQ(aj["procedures"][p]["rejected_indices"].size(), rep0[p]["rejections"].get<std::size_t>()) << p;
  }

  // Same decisions index by index against the in-memory pipeline.
  ebtest::SignalConfig c;
  c.n = 2000;
  c.s_n = 40;
  c.v_n = 3.0;
  const auto theta = ebtest::generate_theta0(c, ebtest::substream_seed(17, 0));
  const auto x = ebtest::simulate_data(theta, ebtest::substream_seed(17, 1));
  const auto res = ebtest::analyze(ebtest::Observations(x), 0.1);
  const auto qchi = ebtest::q_procedure_chi(ebtest::Observations(x), res.weight.w_hat, 0.1);
  std::vector<std::size_t> want;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (qchi.reject[i]) want.push_back(i);
  EXPECT_EQ(aj["procedures"]["qval"]["rejected_indices"].get<std::vector<std::size_t>>(), want);
  want.clear();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (res.cl->reject[i]) want.push_back(i);
  EXPECT_EQ(aj["procedures"]["cl"]["rejected_indices"].get<std::vector<std::size_t>>(), want);
}

TEST_F(CliTest, TheoryReport) {
  const auto r = run({"theory", "--n", "100000", "--s", "1000", "--v", "4", "--t", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  const auto& q = j["quantities"];
  EXPECT_LE(q["w_minus"].get<double>(), q["w_plus"].get<double>());
  EXPECT_LT(q["lambda_minus"].get<double>(), q["lambda_plus"].get<double>());
  EXPECT_TRUE(j.contains("rates"));
}

TEST_F(CliTest, TheoryValidationAndSolverFailure) {
  EXPECT_EQ(run({"theory", "--n", "100", "--s", "100", "--v", "4"}).code, 2);
  EXPECT_EQ(run({"theory", "--n", "100", "--s", "5"}).code, 2);
  // With A this large the right side of the lambda+ equation exceeds
  // (n - s)(E_0 l - t), so no root exists below 1.
  const auto fail = run({"theory", "--n", "100000", "--s", "1000", "--v", "4", "--A", "1000"});
  EXPECT_EQ(fail.code, 3) << fail.err << fail.out;
  EXPECT_NE(fail.err.find("solver"), std::string::npos);
}

TEST_F(CliTest, TheoryLambdaPlusIncreasesWithA) {
  const auto lo = run({"theory", "--n", "100000", "--s", "1000", "--v", "4", "--A", "0.1"});
  const auto hi = run({"theory", "--n", "100000", "--s", "1000", "--v", "4", "--A", "10"});
  ASSERT_EQ(lo.code, 0) << lo.err;
  ASSERT_EQ(hi.code, 0) << hi.err;
  EXPECT_LT(json::parse(lo.out)["quantities"]["lambda_plus"].get<double>(),
            json::parse(hi.out)["quantities"]["lambda_plus"].get<double>());
}

TEST_F(CliTest, TheoryWritesWarningsAndCsv) {
  const auto r = run({"theory", "--n", "20000", "--s", "200", "--v", "5", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_NE(r.out.find("lambda_plus,"), std::string::npos);
}

TEST_F(CliTest, HelpAndUnknownCommand) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}
