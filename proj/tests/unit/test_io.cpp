#include <filesystem>

#include <gtest/gtest.h>

#include "ratchet/io/config.hpp"
#include "ratchet/io/csv.hpp"
#include "ratchet/io/svg_plot.hpp"

using namespace ratchet;
using io::json;

namespace {

json minimal() {
  return json::parse(R"({
    "system": {"b0": 0.036, "nuclei": [{"a_par": 200000, "a_perp": 100000}]},
    "drive": {"eta_e": 1, "eta_r": 2, "c_e": 100, "c_r": 5000},
    "sweep": {"bandwidth": 24000000}
  })");
}

ErrorCode code_of(const json& j) {
  try {
    io::parse_config(j);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidParams;
}

}  // namespace

TEST(Config, Defaults) {
  const auto c = io::parse_config(minimal());
  EXPECT_DOUBLE_EQ(c.sweep.f0(), c.system.electron_resonance());
  EXPECT_DOUBLE_EQ(c.sweep.omega_r(), 100.0);
  EXPECT_DOUBLE_EQ(c.sweep.duration(), 20.0);
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(c.law, TunnelingLaw::Paper);
  EXPECT_TRUE(c.chain.diffusion_unlimited());
  EXPECT_EQ(c.output_dir, std::filesystem::path("out"));
  EXPECT_DOUBLE_EQ(c.drive.rabi(), 10000.0);
}

TEST(Config, GridsAndModes) {
  auto j = minimal();
  j["grids"] = {{"eta_e", {0.4, 20.8}},
                {"omega_r", {{"min", 1}, {"max", 100}, {"points", 3}, {"spacing", "log"}}},
                {"eta_r", {{"min", 0}, {"max", 10}, {"points", 3}, {"spacing", "linear"}}}};
  j["chain"] = {{"kappa_d", 0.5}};
  j["mode"] = {{"tunneling_law", "standard"}, {"reset", {{"partial", 0.8}}}, {"noise", 0.02}};
  j["propagation"] = {{"steps_per_sweep", "auto"}};
  j["seed"] = 17;
  const auto c = io::parse_config(j);
  ASSERT_EQ(c.omega_r_grid.size(), 3u);
  EXPECT_NEAR(c.omega_r_grid[1], 10.0, 1e-12);
  EXPECT_DOUBLE_EQ(c.eta_r_grid[1], 5.0);
  EXPECT_EQ(c.eta_e_grid.size(), 2u);
  EXPECT_DOUBLE_EQ(c.chain.kappa_d, 0.5);
  EXPECT_EQ(c.law, TunnelingLaw::Standard);
  EXPECT_DOUBLE_EQ(c.propagation.reset_mode.polarization(), 0.8);
  EXPECT_TRUE(c.steps_auto);
  EXPECT_EQ(c.seed, 17u);
}

TEST(Config, ErrorsAreConfigErrors) {
  auto no_drive = minimal();
  no_drive.erase("drive");
  EXPECT_EQ(code_of(no_drive), ErrorCode::ConfigError);
  auto bad_b0 = minimal();
  bad_b0["system"]["b0"] = -1;
  EXPECT_EQ(code_of(bad_b0), ErrorCode::ConfigError);
  auto bad_law = minimal();
  bad_law["mode"] = {{"tunneling_law", "exact"}};
  EXPECT_EQ(code_of(bad_law), ErrorCode::ConfigError);
  auto bad_type = minimal();
  bad_type["sweep"]["bandwidth"] = "wide";
  EXPECT_EQ(code_of(bad_type), ErrorCode::ConfigError);
  EXPECT_THROW(io::load_config("/nonexistent/config.json"), Error);
}

TEST(Config, ResolvedRoundTrip) {
  auto j = minimal();
  j["chain"] = {{"kappa_d", "inf"}};
  const auto c = io::parse_config(j);
  const auto again = io::parse_config(io::to_json(c));
  EXPECT_EQ(io::to_json(again), io::to_json(c));
  EXPECT_EQ(io::to_json(c)["chain"]["kappa_d"], "inf");
}

TEST(Csv, FormattingAndWidth) {
  io::CsvTable t({"a", "b"});
  t.add_numbers({1.0, 0.1});
  t.add_row({"x", "y"});
  EXPECT_EQ(t.str(), "a,b\n1,0.1\nx,y\n");
  EXPECT_THROW(t.add_row({"only"}), Error);
  EXPECT_EQ(io::format_number(1.0 / 3.0), "0.333333333333");
}

TEST(Csv, ProfileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "ratchet_io_test";
  io::CsvTable t({"omega_r_hz", "signal"});
  for (int i = 1; i <= 6; ++i) t.add_numbers({10.0 * i, 1.0 / i});
  io::write_text(dir / "sub" / "p.csv", t.str());
  const auto p = io::read_profile_csv(dir / "sub" / "p.csv", {1, 2, 3, 4});
  EXPECT_EQ(p.size(), 6u);
  EXPECT_DOUBLE_EQ(p.omega_r()[2], 30.0);
  EXPECT_DOUBLE_EQ(p.meta().bandwidth, 3.0);
  io::write_text(dir / "bad.csv", "rate,signal\n1,2\n");
  EXPECT_THROW(io::read_profile_csv(dir / "bad.csv", {}), Error);
  std::filesystem::remove_all(dir);
}

TEST(Svg, RendersSeries) {
  const auto svg = io::render_svg({{"a<b", {1, 10, 100}, {0, 1, 0.5}}}, {"t", "x", "y", true});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
  EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
