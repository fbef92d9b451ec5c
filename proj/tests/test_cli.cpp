#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MATRYOSHKA_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, {}};
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("matryoshka_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string out(const std::string& sub = {}) const { return " --out " + (dir_ / sub).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SweepWritesOneCsvPerSlice) {
  const auto r = run("sweep --n 3 --grid 21 --b3 0,0.05,0.1" + out());
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* name : {"sweep_b3_0.csv", "sweep_b3_0.05.csv", "sweep_b3_0.1.csv"}) {
    std::ifstream in(dir_ / name);
    ASSERT_TRUE(in) << name;
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# ", 0), 0u);
    EXPECT_NE(line.find("n_sites=3"), std::string::npos);
    std::getline(in, line);
    EXPECT_EQ(line, "b1_ratio,b2_ratio,b3_ratio,fidelity");
    int rows = 0;
    double min_f = 1.0;
    while (std::getline(in, line)) {
      ++rows;
      min_f = std::min(min_f, std::stod(line.substr(line.rfind(',') + 1)));
    }
    EXPECT_EQ(rows, 441);
    EXPECT_GT(min_f, 0.99) << name;
  }
  const json summary = json::parse(slurp(dir_ / "sweep_summary.json"));
  EXPECT_EQ(summary["config"]["chain"]["n_sites"], 3);
  EXPECT_EQ(summary["summary"].size(), 3u);
}

TEST_F(CliTest, SweepIsByteIdenticalAcrossRunsAndWorkers) {
  ASSERT_EQ(run("sweep --grid 6 --b3 0.1,0" + out("a")).code, 0);
  ASSERT_EQ(run("sweep --grid 6 --b3 0.1,0" + out("b")).code, 0);
  const std::string env_run = "env MATRYOSHKA_WORKERS=3 " + std::string(MATRYOSHKA_CLI_PATH) +
                              " sweep --grid 6 --b3 0.1,0 --out " + (dir_ / "d").string() + " > /dev/null";
  ASSERT_EQ(std::system(env_run.c_str()), 0);
  for (const char* name : {"sweep_b3_0.csv", "sweep_b3_0.1.csv", "sweep_summary.json"}) {
    const std::string a = slurp(dir_ / "a" / name);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir_ / "b" / name)) << name;
    EXPECT_EQ(a, slurp(dir_ / "d" / name)) << name;
  }
}

TEST_F(CliTest, DevicePointPrintsFidelity) {
  const auto r = run("paper-point");
  ASSERT_EQ(r.code, 0);
  ASSERT_EQ(r.out.rfind("F = 0.99", 0), 0u) << r.out;
  const double f = std::stod(r.out.substr(4));
  EXPECT_NEAR(f, 0.998, 0.002);
}

TEST_F(CliTest, ConveyorWritesFourUnitConcurrenceRecords) {
  const auto r = run("conveyor --n 7 --rounds 4" + out());
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(slurp(dir_ / "conveyor.json"));
  EXPECT_EQ(j["config"]["rounds"], 4);
  EXPECT_EQ(j["config"]["chain"]["pattern"], "matryoshka");
  ASSERT_EQ(j["records"].size(), 4u);
  for (const auto& rec : j["records"]) EXPECT_GE(rec["extraction_concurrence"].get<double>(), 1.0 - 1e-8);
  const std::string first = slurp(dir_ / "conveyor.json");
  ASSERT_EQ(run("conveyor --n 7 --rounds 4" + out()).code, 0);
  EXPECT_EQ(first, slurp(dir_ / "conveyor.json"));
}

TEST_F(CliTest, GenerateVerifyFluxGhz) {
  ASSERT_EQ(run("generate --n 5" + out()).code, 0);
  const json g = json::parse(slurp(dir_ / "generate.json"));
  EXPECT_GE(g["verification"]["global_fidelity"].get<double>(), 1.0 - 1e-9);
  EXPECT_EQ(g["schedule"]["central_value"], 0);

  EXPECT_EQ(run("verify --n 7 --initial all1" + out()).code, 0);
  EXPECT_TRUE(json::parse(slurp(dir_ / "verify.json"))["is_matryoshka"].get<bool>());

  ASSERT_EQ(run("flux-check --n 3" + out()).code, 0);
  const json f = json::parse(slurp(dir_ / "flux_check.json"));
  ASSERT_EQ(f["matches"].size(), 2u);
  for (const auto& m : f["matches"]) EXPECT_TRUE(m["is_match"].get<bool>());

  ASSERT_EQ(run("ghz --n 5" + out()).code, 0);
  EXPECT_GE(json::parse(slurp(dir_ / "ghz.json"))["ghz"]["ghz_fidelity"].get<double>(), 1.0 - 1e-8);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  std::ofstream(dir_ / "chain.cfg") << "# device\nn_sites = 5\npattern = matryoshka\nrounds = 2\n";
  ASSERT_EQ(run("conveyor --config " + (dir_ / "chain.cfg").string() + " --n 7" + out()).code, 0);
  const json j = json::parse(slurp(dir_ / "conveyor.json"));
  EXPECT_EQ(j["config"]["chain"]["n_sites"], 7);
  EXPECT_EQ(j["records"].size(), 2u);

  std::ofstream(dir_ / "bad.cfg") << "n_sites = 5\nwobble = 1\n";
  const auto r = run("ghz --config " + (dir_ / "bad.cfg").string() + out());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("wobble"), std::string::npos);
}

TEST_F(CliTest, ValidationErrorsExitTwo) {
  EXPECT_EQ(run("generate --n 4" + out()).code, 2);
  EXPECT_EQ(run("sweep --n 3 --b3 0.2" + out()).code, 2);
  EXPECT_EQ(run("sweep --n 5" + out()).code, 2);
  EXPECT_EQ(run("conveyor --rounds 0" + out()).code, 2);
  EXPECT_EQ(run("ghz --n abc").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("ghz --help").code, 0);
}

TEST_F(CliTest, NumericalViolationsExitThree) {
  // Off-resonant time: the boundary pair is not pure.
  const auto r = run("conveyor --n 7 --rounds 1 --t-star 0.3" + out());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("purity"), std::string::npos) << r.out;
  EXPECT_EQ(run("conveyor --n 7 --rounds 1 --t-star 0.3 --force" + out()).code, 0);
  EXPECT_EQ(run("verify --n 3 --b 0.3,0.3,0.3" + out()).code, 3);
}

TEST_F(CliTest, ShippedConfigsRun) {
  const fs::path cfg = MATRYOSHKA_CONFIG_DIR;
  EXPECT_EQ(run("verify --config " + (cfg / "n9_custom.cfg").string() + out()).code, 0);
  EXPECT_EQ(run("conveyor --config " + (cfg / "n7_conveyor.cfg").string() + out()).code, 0);
  EXPECT_EQ(run("sweep --config " + (cfg / "n3_sweep.cfg").string() + out()).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "sweep_b3_0.05.csv"));
  // The device fields break the ideal structure but not by much.
  EXPECT_EQ(run("verify --config " + (cfg / "n3_device.cfg").string() + out()).code, 3);
  ASSERT_EQ(run("generate --config " + (cfg / "n3_device.cfg").string() + out()).code, 0);
  const double f = json::parse(slurp(dir_ / "generate.json"))["verification"]["global_fidelity"].get<double>();
  EXPECT_NEAR(f, 0.998, 0.002);
}
