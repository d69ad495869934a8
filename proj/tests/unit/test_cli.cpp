#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "ratchet/cli/commands.hpp"

using namespace ratchet;
using io::json;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("ratchet_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  static json base() {
    return json::parse(R"({
      "system": {"b0": 0.036, "nuclei": [{"a_par": 200000, "a_perp": 100000}]},
      "drive": {"eta_e": 4, "eta_r": 36, "c_e": 17.8, "c_r": 1000},
      "sweep": {"f0": "resonance", "bandwidth": 24000000, "omega_r": 50, "duration": 20},
      "grids": {"omega_r": {"min": 1, "max": 3000, "points": 40}}
    })");
  }

  int run(const std::string& cmd, const json& cfg, const std::string& tag) {
    const fs::path path = root_ / (tag + ".json");
    io::write_text(path, cfg.dump());
    cli::RunOptions o;
    o.config = path;
    o.out = root_ / tag;
    o.threads = 2;
    out_.str("");
    err_.str("");
    return cli::run_command(cmd, o, out_, err_);
  }

  std::string read(const std::string& rel) const { return io::read_text(root_ / rel); }

  std::map<std::string, std::string> snapshot(const std::string& tag) const {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root_ / tag)) {
      if (!e.is_regular_file()) continue;
      std::string content = io::read_text(e.path());
      if (e.path().filename() == "manifest.json") {
        auto m = json::parse(content);
        m.erase("wall_time_s");
        m["config"].erase("output");
        content = m.dump();
      }
      files[fs::relative(e.path(), root_ / tag).string()] = content;
    }
    return files;
  }

  fs::path root_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, ProfileWritesAnnotatedSinglePeak) {
  auto cfg = base();
  cfg["mode"] = {{"bulk_profile", true}};
  ASSERT_EQ(run("profile", cfg, "p"), 0) << err_.str();
  const auto manifest = json::parse(read("p/manifest.json"));
  EXPECT_EQ(manifest["command"], "profile");
  EXPECT_TRUE(manifest.contains("wall_time_s"));
  EXPECT_TRUE(manifest["versions"].contains("eigen"));
  EXPECT_EQ(manifest["config"]["seed"], 0);
  const auto annotation = json::parse(read("p/omega_opt.json"));
  EXPECT_TRUE(annotation["analytic"]["interior"].get<bool>());
  EXPECT_TRUE(annotation["bulk"]["interior"].get<bool>());
  EXPECT_TRUE(fs::exists(root_ / "p/profile_bulk.csv"));
  EXPECT_TRUE(fs::exists(root_ / "p/lacs.csv"));

  // Single peak: one sign change of the discrete derivative.
  std::istringstream csv(read("p/profile_analytic.csv"));
  std::string line;
  std::getline(csv, line);
  std::vector<double> p;
  while (std::getline(csv, line)) p.push_back(std::stod(line.substr(line.find(',') + 1)));
  int turns = 0;
  for (std::size_t i = 2; i < p.size(); ++i) {
    if ((p[i] - p[i - 1]) * (p[i - 1] - p[i - 2]) < 0.0) ++turns;
  }
  EXPECT_EQ(turns, 1);
}

TEST_F(CliTest, EmptyGridIsConfigError) {
  auto cfg = base();
  cfg["grids"]["omega_r"] = json::array();
  EXPECT_EQ(run("profile", cfg, "e"), 2);
  EXPECT_NE(err_.str().find("grids.omega_r"), std::string::npos);
}

TEST_F(CliTest, MalformedConfigIsConfigError) {
  const fs::path path = root_ / "broken.json";
  io::write_text(path, "{ not json");
  cli::RunOptions o;
  o.config = path;
  EXPECT_EQ(cli::run_command("profile", o, out_, err_), 2);
  o.config = root_ / "missing.json";
  EXPECT_EQ(cli::run_command("profile", o, out_, err_), 2);
}

TEST_F(CliTest, RuntimeFailureIsExitOne) {
  auto cfg = base();
  cfg["sweep"]["bandwidth"] = 4e6;
  cfg["propagation"] = {{"steps_per_sweep", 10}, {"refine_near_lacs", false}};
  EXPECT_EQ(run("propagate", cfg, "r"), 1);
  EXPECT_NE(err_.str().find("StepTooCoarse"), std::string::npos);
  EXPECT_TRUE(fs::exists(root_ / "r/manifest.json"));
}

TEST_F(CliTest, RerunIsByteIdentical) {
  auto cfg = base();
  cfg["mode"] = {{"bulk_profile", true}, {"noise", 0.02}};
  cfg["seed"] = 5;
  ASSERT_EQ(run("profile", cfg, "a"), 0);
  ASSERT_EQ(run("profile", cfg, "b"), 0);
  EXPECT_EQ(snapshot("a"), snapshot("b"));
  cfg["seed"] = 6;
  ASSERT_EQ(run("profile", cfg, "c"), 0);
  EXPECT_NE(read("a/profile_noisy.csv"), read("c/profile_noisy.csv"));
  EXPECT_EQ(read("a/profile_analytic.csv"), read("c/profile_analytic.csv"));
}

TEST_F(CliTest, RegimesWithoutDiffusionGiveMonotoneSlopes) {
  auto cfg = base();
  cfg["grids"]["eta_e"] = {0.4, 4, 8, 12, 16, 20.8};
  cfg["grids"]["eta_r"] = {12, 24, 36, 48};
  ASSERT_EQ(run("regimes", cfg, "g"), 0) << err_.str();
  int cells = 0;
  for (const auto& e : fs::directory_iterator(root_ / "g/cells")) cells += e.is_regular_file();
  EXPECT_EQ(cells, 24);
  std::istringstream csv(read("g/regimes_summary.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "eta_r_w,slope_hz_per_w,slope_se,intercept_hz,r2,points,status");
  std::vector<double> slopes;
  while (std::getline(csv, line)) {
    const auto a = line.find(',');
    slopes.push_back(std::stod(line.substr(a + 1, line.find(',', a + 1) - a - 1)));
  }
  ASSERT_EQ(slopes.size(), 4u);
  for (std::size_t i = 1; i < slopes.size(); ++i) EXPECT_GT(slopes[i], slopes[i - 1]);
}

TEST_F(CliTest, SingleCellRegressionIsDegenerate) {
  auto cfg = base();
  cfg["grids"]["eta_e"] = {4};
  cfg["grids"]["eta_r"] = {36};
  EXPECT_EQ(run("regimes", cfg, "s"), 0) << err_.str();
  EXPECT_TRUE(fs::exists(root_ / "s/cells/r00_e00.csv"));
  EXPECT_NE(read("s/regimes_summary.csv").find("degenerate"), std::string::npos);
}

TEST_F(CliTest, BuildupHighPowerRisesFaster) {
  auto cfg = base();
  cfg["grids"]["eta_e"] = {0.4, 20.8};
  ASSERT_EQ(run("buildup", cfg, "b"), 0) << err_.str();
  EXPECT_TRUE(fs::exists(root_ / "b/buildup/e00.csv"));
  EXPECT_TRUE(fs::exists(root_ / "b/buildup/e01.csv"));
  std::istringstream csv(read("b/buildup_summary.csv"));
  std::string line;
  std::getline(csv, line);
  std::vector<double> slopes;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    slopes.push_back(std::stod(cells[3]));
  }
  ASSERT_EQ(slopes.size(), 2u);
  EXPECT_GT(slopes[1], slopes[0]);
}

TEST_F(CliTest, PropagateWithoutTiltTransfersNothing) {
  auto cfg = base();
  cfg["system"]["nuclei"] = {{{"a_par", 200000}, {"a_perp", 0}}};
  cfg["drive"]["eta_r"] = 30;
  cfg["sweep"]["bandwidth"] = 2e6;
  cfg["sweep"]["omega_r"] = 2000;
  cfg["propagation"] = {{"steps_per_sweep", "auto"}, {"sweeps", 3}};
  ASSERT_EQ(run("propagate", cfg, "z"), 0) << err_.str();
  std::istringstream csv(read("z/propagation.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "sweep_index,nucleus_index,iz_expectation");
  int rows = 0;
  while (std::getline(csv, line)) {
    EXPECT_NEAR(std::stod(line.substr(line.rfind(',') + 1)), 0.0, 1e-9);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST_F(CliTest, ValidateSurfacesAdiabaticityWarning) {
  auto cfg = base();
  cfg["drive"]["c_r"] = 5e6;
  cfg["drive"]["eta_r"] = 1;
  EXPECT_EQ(run("validate", cfg, "v"), 0);
  EXPECT_NE(err_.str().find("adiabatic"), std::string::npos);
  const auto report = json::parse(read("v/validation.json"));
  ASSERT_FALSE(report["warnings"].empty());
  EXPECT_NE(report["warnings"][0].get<std::string>().find("adiabatic"), std::string::npos);
}

TEST_F(CliTest, FitCommandReadsProfile) {
  auto cfg = base();
  cfg["gaps"] = {{"eps1", 50000}, {"eps2", 15000}};
  cfg["drive"] = {{"eta_e", 1}, {"eta_r", 1}, {"c_e", 200}, {"c_r", 1000}};
  cfg["grids"]["omega_r"] = {{"min", 5}, {"max", 5000}, {"points", 30}};
  ASSERT_EQ(run("profile", cfg, "src"), 0);
  cfg["fit"] = {{"profile", (root_ / "src/profile_analytic.csv").string()}};
  ASSERT_EQ(run("fit", cfg, "f"), 0) << err_.str();
  const auto fit = json::parse(read("f/fit.json"));
  EXPECT_NEAR(fit["eps1_fit"].get<double>() / 50000.0, 1.0, 1e-3);
}

#ifdef RATCHET_CLI_PATH
TEST_F(CliTest, BinaryExitCodes) {
  const std::string cli = RATCHET_CLI_PATH;
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " > /dev/null 2>&1").c_str())), 2);
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " profile --bogus > /dev/null 2>&1").c_str())), 2);
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " profile --config /nonexistent.json > /dev/null 2>&1").c_str())), 2);
  auto cfg = base();
  io::write_text(root_ / "ok.json", cfg.dump());
  const std::string ok = cli + " profile --config " + (root_ / "ok.json").string() + " --out " +
                         (root_ / "bin").string() + " --tunneling-law standard > /dev/null 2>&1";
  EXPECT_EQ(WEXITSTATUS(std::system(ok.c_str())), 0);
  EXPECT_EQ(json::parse(read("bin/manifest.json"))["tunneling_law"], "standard");
}
#endif
