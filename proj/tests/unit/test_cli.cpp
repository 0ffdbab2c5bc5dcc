#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "swioss/conditions.hpp"
#include "swioss/io.hpp"
#include "swioss/signals.hpp"

namespace swioss::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("swioss_cli_") + info->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  json read_json(const fs::path& p) const { return json::parse(read_file(p)); }

  fs::path dir_;
  std::ostringstream log_;
};

TEST_F(CliTest, CheckBuiltinIsFeasible) {
  CheckOptions o;
  o.builtin = "paper-example";
  EXPECT_EQ(run_check(o, log_), kSuccess);
  EXPECT_NE(log_.str().find("-0.6973"), std::string::npos) << log_.str();
}

TEST_F(CliTest, CheckWritesCertificateWhenAsked) {
  CheckOptions o;
  o.config = SWIOSS_CONFIG_DIR "/paper_example.cfg";
  o.out = dir_;
  ASSERT_EQ(run_check(o, log_), kSuccess);
  const json cert = read_json(dir_ / "certificate.json");
  EXPECT_NEAR(cert["lhs9"].get<double>(), -0.6973, 5e-4);
  EXPECT_TRUE(fs::exists(dir_ / "manifest.json"));
}

TEST_F(CliTest, CheckCounterexampleIsInfeasible) {
  CheckOptions o;
  o.config = SWIOSS_CONFIG_DIR "/prop1_counterexample.cfg";
  EXPECT_EQ(run_check(o, log_), kFailed);
}

TEST_F(CliTest, CheckWideWindowNamesNecessaryCondition) {
  CheckOptions o;
  o.config = SWIOSS_CONFIG_DIR "/wide_dwell_window.cfg";
  EXPECT_EQ(run_check(o, log_), kFailed);
  EXPECT_NE(log_.str().find("necessary condition"), std::string::npos) << log_.str();
}

TEST_F(CliTest, CheckInputErrors) {
  CheckOptions o;
  o.config = "/nonexistent.cfg";
  EXPECT_EQ(run_check(o, log_), kInputError);
  CheckOptions both;
  both.builtin = "paper-example";
  both.config = SWIOSS_CONFIG_DIR "/paper_example.cfg";
  EXPECT_EQ(run_check(both, log_), kInputError);
  CheckOptions unknown;
  unknown.builtin = "nope";
  EXPECT_EQ(run_check(unknown, log_), kInputError);
}

TEST_F(CliTest, CheckMarginAndDwellOverride) {
  CheckOptions o;
  o.builtin = "paper-example";
  o.margin = 0.8;
  EXPECT_EQ(run_check(o, log_), kFailed);
  o.margin = 0.0;
  o.dwell = DwellPair{4.0, 3.5};
  EXPECT_EQ(run_check(o, log_), kSuccess);
  o.dwell = DwellPair{1.0, 3.5};
  EXPECT_EQ(run_check(o, log_), kInputError);
}

TEST_F(CliTest, GenWritesValidSignals) {
  GenOptions o;
  o.builtin = "paper-example";
  o.out = dir_;
  o.n = 5;
  o.horizon = 20.0;
  ASSERT_EQ(run_gen(o, log_), kSuccess);
  const SystemFamily f = builtin_paper_example();
  const DwellCertificate cert = certify(f);
  for (int k = 0; k < 5; ++k) {
    const SwitchingSignal s = load_signal(dir_ / ("signal_" + std::to_string(k) + ".json"));
    EXPECT_EQ(s.horizon(), 20.0);
    EXPECT_TRUE(validate_stabilizing(s, f.rules(), cert.dwell()).ok());
  }
  EXPECT_FALSE(fs::exists(dir_ / "signal_5.json"));
}

TEST_F(CliTest, GenInfeasibleFamily) {
  GenOptions o;
  o.config = SWIOSS_CONFIG_DIR "/prop1_counterexample.cfg";
  o.out = dir_;
  EXPECT_EQ(run_gen(o, log_), kFailed);
}

TEST_F(CliTest, SimZeroTrajectory) {
  const fs::path sig = fs::temp_directory_path() / "swioss_cli_zero_signal.json";
  write_file(sig, signal_to_json(SwitchingSignal({{0.0, 1}, {3.5, 2}, {7.5, 1}}, 10.0)));
  SimOptions o;
  o.builtin = "paper-example";
  o.out = dir_;
  o.signal = sig.string();
  o.x0 = {0.0, 0.0};
  o.input = "zero";
  ASSERT_EQ(run_sim(o, log_), kSuccess) << log_.str();
  const std::string csv = read_file(dir_ / "run_0.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x1,x2,y1,v1,sigma,z,w,zeta,upsilon");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    for (int i = 0; i < 4; ++i) {
      std::getline(cells, cell, ',');
      ASSERT_EQ(cell, "0") << line;
    }
  }
  EXPECT_EQ(rows, 10001);
  EXPECT_EQ(read_json(dir_ / "run_0.json")["max_norm"].get<double>(), 0.0);
  fs::remove(sig);
}

TEST_F(CliTest, SimRejectsBadOptions) {
  SimOptions o;
  o.builtin = "paper-example";
  o.out = dir_;
  o.x0 = {1.0};
  EXPECT_EQ(run_sim(o, log_), kInputError);
  o.x0 = {};
  o.input = "bogus";
  EXPECT_EQ(run_sim(o, log_), kInputError);
  o.input = "uniform";
  o.step = 0.0003;
  EXPECT_EQ(run_sim(o, log_), kInputError);
}

TEST_F(CliTest, SimExpressionInput) {
  SimOptions o;
  o.builtin = "paper-example";
  o.out = dir_;
  o.x0 = {0.5, -0.5};
  o.input = "expr:0.1*sin(t)";
  o.horizon = 5.0;
  EXPECT_EQ(run_sim(o, log_), kSuccess) << log_.str();
}

TEST_F(CliTest, EstimateAutoParams) {
  EstimateOptions o;
  o.builtin = "paper-example";
  o.out = dir_;
  o.horizon = 10.0;
  ASSERT_EQ(run_estimate(o, log_), kSuccess) << log_.str();
  const json est = read_json(dir_ / "estimator.json");
  EXPECT_TRUE(est["accepted"].get<bool>());
  for (const char* key : {"c11", "c12", "c14"}) EXPECT_LT(est["values"][key].get<double>(), 0.0);
  EXPECT_LE(est["values"]["c15"].get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(dir_ / "envelope.json"));
  EXPECT_TRUE(fs::exists(dir_ / "envelope_0.csv"));
}

TEST_F(CliTest, EstimateRejectedParams) {
  EstimateOptions o;
  o.builtin = "paper-example";
  o.out = dir_;
  o.params = "3.5,0.75,3,4.2";
  EXPECT_EQ(run_estimate(o, log_), kFailed);
  EXPECT_FALSE(read_json(dir_ / "estimator.json")["accepted"].get<bool>());
  o.params = "1,2";
  EXPECT_EQ(run_estimate(o, log_), kInputError);
}

TEST_F(CliTest, ReproShortRun) {
  ReproOptions o;
  o.out = dir_;
  o.seeds = {1, 2};
  o.horizon = 5.0;
  ASSERT_EQ(run_repro(o, log_), kSuccess) << log_.str();
  const json summary = read_json(dir_ / "summary.json");
  EXPECT_TRUE(summary["all_passed"].get<bool>());
  EXPECT_EQ(summary["runs"].size(), 2u);
  for (const char* f : {"signal_1.json", "run_1.csv", "envelope_1.csv", "run_2.csv",
                        "certificate.json", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
}

TEST_F(CliTest, ReproTightBoundNamesFailingRun) {
  ReproOptions o;
  o.out = dir_;
  o.seeds = {2};
  o.horizon = 3.0;
  o.bound = 1e-3;
  EXPECT_EQ(run_repro(o, log_), kFailed);
  const json summary = read_json(dir_ / "summary.json");
  EXPECT_EQ(summary["failing_runs"], json::array({1}));
  EXPECT_NE(log_.str().find("bounded"), std::string::npos);
}

TEST_F(CliTest, ReproEmptyHorizon) {
  ReproOptions o;
  o.out = dir_;
  o.horizon = 0.0;
  EXPECT_EQ(run_repro(o, log_), kInputError);
  EXPECT_NE(log_.str().find("empty trajectory"), std::string::npos) << log_.str();
}

TEST_F(CliTest, ReproIsDeterministic) {
  ReproOptions o;
  o.seeds = {4};
  o.horizon = 4.0;
  o.out = dir_ / "a";
  ASSERT_EQ(run_repro(o, log_), kSuccess);
  o.out = dir_ / "b";
  ASSERT_EQ(run_repro(o, log_), kSuccess);
  for (const char* f : {"run_1.csv", "envelope_1.csv", "signal_1.json", "summary.json"}) {
    EXPECT_EQ(read_file(dir_ / "a" / f), read_file(dir_ / "b" / f)) << f;
  }
}

TEST(ParseNumberListTest, Values) {
  EXPECT_EQ(parse_number_list("3,0.75, 3 ,4.2"), (std::vector<double>{3, 0.75, 3, 4.2}));
  EXPECT_THROW(parse_number_list("1,,2"), std::exception);
  EXPECT_THROW(parse_number_list("1,x"), std::exception);
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(SWIOSS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliBinaryTest, ExitCodes) {
  EXPECT_EQ(run_binary("check --builtin paper-example"), 0);
  EXPECT_EQ(run_binary("check --config " SWIOSS_CONFIG_DIR "/prop1_counterexample.cfg"), 1);
  EXPECT_EQ(run_binary("check --config /nonexistent.cfg"), 2);
  EXPECT_EQ(run_binary("check --builtin paper-example --dwell 4,3.5"), 0);
  EXPECT_EQ(run_binary("check --builtin paper-example --dwell 4"), 2);
  EXPECT_EQ(run_binary("frobnicate"), 2);
  EXPECT_EQ(run_binary("gen --builtin paper-example"), 2);  // --out missing
  EXPECT_EQ(run_binary("--help"), 0);
}

}  // namespace
}  // namespace swioss::cli
