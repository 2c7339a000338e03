#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(RISKPOOL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("riskpool_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& text) {
    auto p = dir_ / "run.ini";
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, StationaryDefaultsFavourInsurance) {
  ASSERT_EQ(run("stationary --out " + dir_.string()), 0);
  auto meta = nlohmann::json::parse(slurp(dir_ / "stationary.json"));
  EXPECT_EQ(meta["argmax"], "I");
  EXPECT_EQ(meta["parameters"]["alpha"], 0.8);
  EXPECT_EQ(meta["schema_version"], 1);
  auto csv = slurp(dir_ / "stationary.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "i_S,i_I,prob");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1327);
  auto summary = slurp(dir_ / "stationary_summary.csv");
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "p_S,p_I,p_A,residual");
}

TEST_F(CliTest, NeutralOverrideGivesThirds) {
  ASSERT_EQ(run("stationary --set beta=0 --set Z=20 --set N=10 --out " + dir_.string()), 0);
  auto meta = nlohmann::json::parse(slurp(dir_ / "stationary.json"));
  for (const char* k : {"p_S", "p_I", "p_A"}) EXPECT_NEAR(meta["adoption"][k].get<double>(), 1.0 / 3, 1e-9);
  EXPECT_EQ(meta["parameters"]["beta"], 0.0);
  EXPECT_EQ(meta["parameters"]["Z"], 20);
}

TEST_F(CliTest, OverrideBeatsConfigFile) {
  auto cfg = write_config("[model]\nalpha = 0.5\nZ = 12\nN = 6\n");
  ASSERT_EQ(run("stationary -c " + cfg.string() + " --set alpha=0.3 --out " + dir_.string()), 0);
  auto meta = nlohmann::json::parse(slurp(dir_ / "stationary.json"));
  EXPECT_EQ(meta["parameters"]["alpha"], 0.3);
  EXPECT_EQ(meta["parameters"]["Z"], 12);
}

TEST_F(CliTest, McIsByteIdenticalForSameSeed) {
  const std::string common = "mc --seed 7 --set Z=10 --set N=5 --set mc.steps=20000 --set mc.burnin=100 ";
  ASSERT_EQ(run(common + "--out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run(common + "--out " + (dir_ / "b").string()), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "mc.csv"), slurp(dir_ / "b" / "mc.csv"));
  auto meta = nlohmann::json::parse(slurp(dir_ / "a" / "mc.json"));
  EXPECT_EQ(meta["seed"], 7);
  EXPECT_EQ(meta["steps"], 20000);
  EXPECT_TRUE(meta.contains("tv_distance_to_exact"));
}

TEST_F(CliTest, GradientSchema) {
  ASSERT_EQ(run("gradient --set Z=10 --set N=5 --out " + dir_.string()), 0);
  auto csv = slurp(dir_ / "gradient.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "i_S,i_I,g_I,g_S");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 67);
  EXPECT_TRUE(fs::exists(dir_ / "gradient.json"));
}

TEST_F(CliTest, SweepIsDeterministicAndReportsBadPoints) {
  auto cfg = write_config(
      "[model]\nZ = 12\nN = 6\n[sweep]\naxis1 = r = 0.001, 0.3\naxis2 = alpha = 0.5, 0.8\noutputs = adoption, stationary\n");
  ASSERT_EQ(run("sweep -c " + cfg.string() + " -t 3 --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run("sweep -c " + cfg.string() + " -t 1 --out " + (dir_ / "b").string()), 0);
  auto csv = slurp(dir_ / "a" / "sweep.csv");
  EXPECT_EQ(csv, slurp(dir_ / "b" / "sweep.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "r,alpha,p_S,p_I,p_A,profit,argmax");
  EXPECT_NE(csv.find("invalid"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "sweep_point_0_stationary.csv"));
  auto meta = nlohmann::json::parse(slurp(dir_ / "a" / "sweep.json"));
  EXPECT_TRUE(meta["points"][2].contains("error"));
}

TEST_F(CliTest, PremiumWritesCurve) {
  ASSERT_EQ(run("premium --set Z=12 --set N=6 --set premium.grid=0.16:0.18:0.005 --out " + dir_.string()), 0);
  auto csv = slurp(dir_ / "premium.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "c,p_S,p_I,p_A,profit,argmax");
  auto meta = nlohmann::json::parse(slurp(dir_ / "premium.json"));
  EXPECT_TRUE(meta.contains("best_c"));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run("stationary --set r=0.5 --out " + dir_.string()), 2);
  EXPECT_EQ(run("stationary --set nosuch=1 --out " + dir_.string()), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  auto bad = write_config("[model]\nfoo = 1\n");
  EXPECT_EQ(run("stationary -c " + bad.string()), 2);
  // mu = 0 without allow_reducible: solver refuses
  EXPECT_EQ(run("stationary --set mu=0 --set Z=10 --set N=5 --out " + dir_.string()), 1);
}

TEST_F(CliTest, ConfigRoundTrip) {
  const std::string out = (dir_ / "effective.ini").string();
  auto cfg = write_config("[model]\ngamma = 0.65\n[premium]\ngrid = 0.16, 0.17\n");
  ASSERT_EQ(std::system((std::string(RISKPOOL_CLI_PATH) + " config -c " + cfg.string() + " > " + out).c_str()), 0);
  const std::string first = slurp(out);
  const std::string again = (dir_ / "again.ini").string();
  ASSERT_EQ(std::system((std::string(RISKPOOL_CLI_PATH) + " config -c " + out + " > " + again).c_str()), 0);
  EXPECT_EQ(first, slurp(again));
}
