#include <gtest/gtest.h>

#include "ratchet/spin_system.hpp"

using namespace ratchet;

namespace {

bool has_warning(const ValidationReport& r, const std::string& needle) {
  for (const auto& w : r.warnings) {
    if (w.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(SpinSystem, NuclearLarmorAt36mT) {
  const SpinSystem sys(0.036, {});
  EXPECT_NEAR(sys.omega_n(), 385380.0, 1e-6);
  EXPECT_NEAR(sys.electron_resonance(), 1.861136e9, 1e-3);
}

TEST(SpinSystem, RejectsNonPositiveField) {
  EXPECT_THROW(SpinSystem(0.0, {}), Error);
  try {
    SpinSystem(-1.0, {});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSystem);
  }
}

TEST(SweepConfig, ZeroBandwidthIsInvalidSweep) {
  try {
    SweepConfig(3.815e9, 0.0, 100.0, 20.0);
    FAIL() << "expected InvalidSweep";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSweep);
  }
}

TEST(SweepConfig, WindowAndVelocity) {
  const SweepConfig s(3.815e9, 24e6, 100.0, 20.0);
  EXPECT_DOUBLE_EQ(s.window_low(), 3.815e9 - 12e6);
  EXPECT_DOUBLE_EQ(s.window_high(), 3.815e9 + 12e6);
  EXPECT_DOUBLE_EQ(s.velocity(), 2.4e9);
  EXPECT_DOUBLE_EQ(s.sweep_count(), 2000.0);
}

TEST(DriveConfig, RatesAreLinearInPower) {
  const DriveConfig d(2.0, 3.0, 17.8, 1000.0);
  EXPECT_DOUBLE_EQ(d.kappa_e(), 35.6);
  EXPECT_DOUBLE_EQ(d.rabi(), 3000.0);
  EXPECT_THROW(DriveConfig(-1.0, 0.0, 1.0, 1.0), Error);
}

TEST(Validate, Figure1SettingsPass) {
  const SpinSystem sys(0.036, {HyperfineCoupling(200e3, 100e3)});
  const DriveConfig drive(1.0, 1.0, 200.0, 50e3);
  const auto r = validate_system(sys, drive, SweepConfig(3.815e9, 24e6, 100.0, 20.0));
  EXPECT_TRUE(r.passed);
  EXPECT_FALSE(has_warning(r, "adiabatic"));
}

TEST(Validate, WideGapAgainstBandwidthWarns) {
  const SpinSystem sys(0.036, {HyperfineCoupling(200e3, 100e3)});
  const DriveConfig drive(1.0, 1.0, 200.0, 5e6);
  const auto r = validate_system(sys, drive, SweepConfig(3.815e9, 24e6, 100.0, 20.0));
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(has_warning(r, "adiabatic"));
}

TEST(Validate, NegativeDenominatorWarns) {
  const SpinSystem sys(0.036, {HyperfineCoupling(-500e3, 100e3)});
  const DriveConfig drive(1.0, 1.0, 200.0, 50e3);
  const auto r = validate_system(sys, drive, SweepConfig(sys.electron_resonance(), 24e6, 100.0, 20.0));
  EXPECT_TRUE(has_warning(r, "omega_n + a_par <= 0"));
}
