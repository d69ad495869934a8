#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ratchet/ratchet_analytic.hpp"

using namespace ratchet;

namespace {

RatchetParams figure_params(double kappa_e = 200.0) {
  return {kappa_e, 50e3, 15e3, 24e6, 20.0};
}

}  // namespace

TEST(Tunneling, PaperLawValues) {
  EXPECT_DOUBLE_EQ(tunneling_probability(0.0, 100.0, 24e6), 1.0);
  EXPECT_NEAR(tunneling_probability(20e3, 100.0, 24e6), 0.8464817248906141, 1e-15);
  EXPECT_LT(tunneling_probability(20e3, 1e-9, 24e6), 1e-300);
  EXPECT_THROW(tunneling_probability(1.0, 0.0, 24e6), Error);
}

TEST(Tunneling, StandardLawIsAngularLandauZener) {
  const double eps = 30e3, v = 2.4e9;
  EXPECT_NEAR(lz_reference_probability(eps, v), std::exp(-std::numbers::pi * std::numbers::pi * eps * eps / v), 1e-15);
  EXPECT_DOUBLE_EQ(lz_reference_probability(0.0, v), 1.0);
  EXPECT_LT(lz_reference_probability(eps, 1e-3), 1e-300);
  EXPECT_DOUBLE_EQ(tunneling_probability(eps, 100.0, 2.4e7, TunnelingLaw::Standard),
                   lz_reference_probability(eps, v));
}

TEST(Tunneling, LawParsing) {
  EXPECT_EQ(parse_tunneling_law("paper"), TunnelingLaw::Paper);
  EXPECT_EQ(parse_tunneling_law("standard"), TunnelingLaw::Standard);
  EXPECT_STREQ(to_string(TunnelingLaw::Standard), "standard");
  EXPECT_THROW(parse_tunneling_law("exact"), Error);
}

TEST(TransitionMatrix, LimitsAreIdentity) {
  for (auto [t1, t2] : {std::pair{1.0, 1.0}, std::pair{0.0, 0.0}}) {
    const auto m = sweep_transition_matrix(t1, t2);
    EXPECT_DOUBLE_EQ(m.down_down, 1.0);
    EXPECT_DOUBLE_EQ(m.up_up, 1.0);
    EXPECT_DOUBLE_EQ(m.down_up, 0.0);
    EXPECT_DOUBLE_EQ(m.up_down, 0.0);
  }
}

TEST(TransitionMatrix, PathEnumeration) {
  const auto m = sweep_transition_matrix(0.25, 0.5);
  EXPECT_DOUBLE_EQ(m.up_down, 0.5625);
  EXPECT_DOUBLE_EQ(m.down_up, 0.375);
  EXPECT_DOUBLE_EQ(m.row_sum_down(), 1.0);
  EXPECT_DOUBLE_EQ(m.row_sum_up(), 1.0);
  EXPECT_THROW(sweep_transition_matrix(1.5, 0.0), Error);
}

TEST(PerSweepPolarization, Values) {
  EXPECT_DOUBLE_EQ(per_sweep_polarization(0.0, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(per_sweep_polarization(0.5, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(per_sweep_polarization(0.25, 0.5), 0.375);
  EXPECT_NEAR(sweep_transition_matrix(0.25, 0.5).column_difference(), 0.375, 1e-15);
}

TEST(PerSweepPolarization, EqualsColumnDifference) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double t1 = u(rng), t2 = u(rng);
    EXPECT_NEAR(per_sweep_polarization(t1, t2), sweep_transition_matrix(t1, t2).column_difference(),
                1e-14);
    EXPECT_NEAR(per_sweep_polarization(t1, t2), 4.0 * t1 * (1.0 - t1) * (1.0 - t2), 1e-14);
  }
}

TEST(BuildupRate, DirectEvaluation) {
  EXPECT_NEAR(buildup_rate(150.0, figure_params()), 6.692447842447028, 1e-10);
}

TEST(BuildupRate, VanishesAtBothEnds) {
  const auto p = figure_params();
  EXPECT_LT(buildup_rate(1e-2, p), 1e-12);
  EXPECT_LT(buildup_rate(1e9, p), 1e-3);
  EXPECT_GT(buildup_rate(100.0, p), 1.0);
}

TEST(TotalPolarization, LinearInDuration) {
  auto p = figure_params();
  const double base = total_polarization(p, 120.0);
  p.duration = 40.0;
  EXPECT_DOUBLE_EQ(total_polarization(p, 120.0), 2.0 * base);
  p.duration = 0.0;
  EXPECT_DOUBLE_EQ(total_polarization(p, 120.0), 0.0);
}

TEST(OmegaOpt, FigureParameters) {
  const double w = find_omega_opt(figure_params());
  EXPECT_NEAR(w, 112.364837, 1e-4);
  const auto p = figure_params();
  EXPECT_GE(buildup_rate(w, p), buildup_rate(w * 1.001, p));
  EXPECT_GE(buildup_rate(w, p), buildup_rate(w / 1.001, p));
}

TEST(OmegaOpt, GapScalingInFastPumpingLimit) {
  RatchetParams p{1e9, 50e3, 15e3, 24e6, 20.0};
  const double w1 = find_omega_opt(p);
  p.eps1 *= 2.0;
  p.eps2 *= 2.0;
  EXPECT_NEAR(find_omega_opt(p) / w1, 4.0, 1e-6);
}

TEST(OmegaOpt, IndependentOfPumpingWhenSaturated) {
  EXPECT_NEAR(find_omega_opt(figure_params(1e9)), find_omega_opt(figure_params(1e11)), 1e-6);
}

TEST(OmegaOpt, NondecreasingInPumping) {
  double prev = 0.0;
  for (double k : {5.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1e3, 1e4}) {
    const double w = find_omega_opt(figure_params(k));
    EXPECT_GE(w, prev * (1.0 - 1e-9)) << "kappa_e = " << k;
    prev = w;
  }
}

TEST(OmegaOpt, BoundaryMaximumThrows) {
  try {
    find_omega_opt(figure_params(), {200.0, 1e6});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoInteriorMaximum);
  }
}

TEST(RatchetParams, Validation) {
  RatchetParams p = figure_params();
  EXPECT_NO_THROW(p.validate());
  EXPECT_FALSE(p.gap_order_suspect());
  p.eps2 = 60e3;
  EXPECT_TRUE(p.gap_order_suspect());
  p.bandwidth = 0.0;
  EXPECT_THROW(p.validate(), Error);
}
