#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ratchet/lz_cascade.hpp"

using namespace ratchet;

namespace {

SpinSystem reference_system() { return SpinSystem(0.036, {HyperfineCoupling(200e3, 100e3)}); }

DriveConfig rabi(double hz) { return DriveConfig(1.0, 1.0, 1.0, hz); }

SweepConfig centred(const SpinSystem& s, double bandwidth) {
  return SweepConfig(s.electron_resonance(), bandwidth, 100.0, 1.0);
}

}  // namespace

TEST(NuclearFrequencies, BareZeemanLimit) {
  const SpinSystem sys(0.036, {HyperfineCoupling(0.0, 0.0)});
  const auto f = nuclear_frequencies(sys, 0);
  EXPECT_DOUBLE_EQ(f.omega0, sys.omega_n());
  EXPECT_DOUBLE_EQ(f.omega1, sys.omega_n());
}

TEST(NuclearFrequencies, ReferenceCoupling) {
  const auto f = nuclear_frequencies(reference_system(), 0);
  EXPECT_NEAR(f.omega1, 593860.0377193266, 1e-6);
  EXPECT_NEAR(f.omega0 - 385380.0, 35152.055749128915, 1e-6);
}

TEST(AnalyticGaps, ReferenceCoupling) {
  const auto g = analytic_gaps(reference_system(), rabi(100e3));
  EXPECT_DOUBLE_EQ(g.eps1, 100e3);
  EXPECT_NEAR(g.eps2, 34165.840992176025, 1e-6);
}

TEST(AnalyticGaps, UndefinedSignThrowsDomainError) {
  const SpinSystem sys(0.036, {HyperfineCoupling(-400e3, 10e3)});
  try {
    analytic_gaps(sys, rabi(1e3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainError);
  }
  EXPECT_THROW(analytic_gaps(sys, rabi(1e3), 3), Error);
}

TEST(Hamiltonian, BareElectronSplitsByRabi) {
  const SpinSystem sys(0.036, {});
  const auto h = build_hamiltonian(sys, rabi(30e3), sys.electron_resonance());
  ASSERT_EQ(h.dim(), 2u);
  const auto e = h.eigenvalues();
  EXPECT_NEAR(e(1) - e(0), 30e3, 1e-6);
}

TEST(Hamiltonian, HermitianForRandomDraws) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> a(-300e3, 300e3), b(0.0, 200e3), w(-5e6, 5e6);
  for (int k = 0; k < 1000; ++k) {
    const SpinSystem sys(0.036, {HyperfineCoupling(a(rng), b(rng)), HyperfineCoupling(a(rng), b(rng))});
    const auto h = build_hamiltonian(sys, rabi(b(rng)), sys.electron_resonance() + w(rng));
    const auto& m = h.matrix();
    ASSERT_LE((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * m.cwiseAbs().maxCoeff());
  }
}

TEST(Hamiltonian, NoDriveIsBlockDiagonal) {
  const auto sys = reference_system();
  const auto h = build_hamiltonian(sys, rabi(0.0), sys.electron_resonance() + 1e5);
  const auto& m = h.matrix();
  EXPECT_EQ(m.topRightCorner(2, 2).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(m.bottomLeftCorner(2, 2).cwiseAbs().maxCoeff(), 0.0);
}

TEST(HermitianMatrix, RejectsNonHermitian) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(HermitianMatrix{m}, Error);
}

TEST(Cascade, ReferenceSystemOrderAndGaps) {
  const auto sys = reference_system();
  const auto cascade = locate_lacs(sys, rabi(100e3), centred(sys, 4e6));
  ASSERT_EQ(cascade.size(), 4u);
  EXPECT_EQ(cascade[0].branch_label, "0:u|1:d");
  EXPECT_EQ(cascade[1].branch_label, "0:d|1:d");
  EXPECT_EQ(cascade[2].branch_label, "0:u|1:u");
  EXPECT_EQ(cascade[3].branch_label, "0:d|1:u");
  EXPECT_FALSE(cascade[0].conserving());
  EXPECT_TRUE(cascade[1].conserving());
  for (std::size_t i = 1; i < cascade.size(); ++i) EXPECT_LT(cascade[i - 1].location, cascade[i].location);

  // Conserving gap matches the closed form for eps1.
  EXPECT_NEAR(cascade[1].gap / analytic_gaps(sys, rabi(100e3)).eps1, 1.0, 0.05);
  EXPECT_NEAR(cascade[2].gap / analytic_gaps(sys, rabi(100e3)).eps1, 1.0, 0.05);
  // Flip gap matches the diabatic overlap Rabi * sin(alpha / 2).
  EXPECT_NEAR(cascade[0].gap, 8449.710768390194, 0.05 * 8449.7);
  EXPECT_NEAR(cascade[3].gap, 8449.710768390194, 0.05 * 8449.7);
}

TEST(Cascade, ScannedGapsMatchPredictionForRandomSystems) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> apar(50e3, 400e3), aperp(20e3, 200e3), om(5e3, 40e3);
  for (int k = 0; k < 100; ++k) {
    const SpinSystem sys(0.036, {HyperfineCoupling(apar(rng), aperp(rng))});
    const auto drive = rabi(om(rng));
    const auto sweep = centred(sys, 4e6);
    const auto predicted = predict_lacs(sys, drive);
    const auto located = locate_lacs(sys, drive, sweep);
    ASSERT_EQ(located.size(), predicted.size());
    for (std::size_t i = 0; i < located.size(); ++i) {
      EXPECT_EQ(located[i].branch_label, predicted[i].branch_label);
      EXPECT_NEAR(located[i].gap / predicted[i].gap, 1.0, 0.05) << "system " << k << " lac " << i;
    }
  }
}

TEST(Cascade, VanishingTiltFlagsDegenerateFlipCrossings) {
  const SpinSystem sys(0.036, {HyperfineCoupling(200e3, 0.0)});
  EXPECT_EQ(analytic_gaps(sys, rabi(50e3)).eps2, 0.0);
  const auto cascade = locate_lacs(sys, rabi(50e3), centred(sys, 4e6));
  int degenerate = 0;
  for (const auto& l : cascade) {
    if (!l.conserving()) {
      EXPECT_TRUE(l.degenerate);
      ++degenerate;
    }
  }
  EXPECT_EQ(degenerate, 2);
}

TEST(Cascade, TwoNucleiAllCrossingsFound) {
  const SpinSystem sys(0.036, {HyperfineCoupling(200e3, 100e3), HyperfineCoupling(-90e3, 60e3)});
  const auto cascade = locate_lacs(sys, rabi(20e3), centred(sys, 4e6));
  EXPECT_EQ(cascade.size(), 16u);
  EXPECT_EQ(cascade.nucleus_count(), 2u);
}

TEST(Cascade, ResonanceOutsideWindowThrows) {
  const auto sys = reference_system();
  try {
    locate_lacs(sys, rabi(100e3), SweepConfig(3.815e9, 24e6, 100.0, 20.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoCrossingInBandwidth);
  }
}

TEST(Cascade, BranchLabels) {
  EXPECT_EQ(branch_label(0b01, 0b10, 2), "0:ud|1:du");
}
