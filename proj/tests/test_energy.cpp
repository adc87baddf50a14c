#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "heis/energy.hpp"

namespace {

using heis::Point;
using heis::Radii;

TEST(BoxKernel, Examples) {
  EXPECT_DOUBLE_EQ(heis::box_kernel(0.0, Point(0, 0, 4)), 2.0);
  EXPECT_DOUBLE_EQ(heis::box_kernel(1.0, Point(0, 1, 2)), 1.0);
  EXPECT_DOUBLE_EQ(heis::box_kernel(0.7, Point()), 0.0);
}

TEST(EnergyBound, ClosedFormExamples) {
  const auto thin = heis::energy_bound_rect(0.5, Radii(0.1, 1.0));
  EXPECT_NEAR(thin.bound, 1e-4, 1e-16);
  EXPECT_EQ(thin.case_tag, heis::EnergyCase::ThinLow);
  const auto flat = heis::energy_bound_rect(3.5, Radii(1.0, 0.1));
  EXPECT_NEAR(flat.bound, 1e-3, 1e-15);
  EXPECT_EQ(flat.case_tag, heis::EnergyCase::FlatHigh);
}

TEST(EnergyBound, DiagonalAgreesExactly) {
  for (double t : {0.5, 1.5, 2.5, 3.5}) {
    for (double c : {0.3, 0.9, 1.7}) {
      const double bound = heis::energy_bound_rect(t, Radii(c, c)).bound;
      EXPECT_EQ(bound, std::pow(c, 8.0 - t));
    }
  }
}

TEST(EnergyBound, RejectsLogBreakpoints) {
  for (double t : {1.0, 2.0, 3.0}) {
    EXPECT_THROW(heis::energy_bound_rect(t, Radii(1, 1)), std::domain_error);
  }
  EXPECT_THROW(heis::energy_bound_rect(0.0, Radii(1, 1)), std::domain_error);
  EXPECT_THROW(heis::energy_bound_rect(4.0, Radii(1, 1)), std::domain_error);
}

TEST(RectEnergy, SeedDeterminism) {
  const auto a = heis::riesz_energy_rect(Radii(1, 1), 1.5, 2000, heis::Rng(77));
  const auto b = heis::riesz_energy_rect(Radii(1, 1), 1.5, 2000, heis::Rng(77));
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.stderr_, b.stderr_);
  EXPECT_EQ(a.seed, 77u);
  EXPECT_EQ(a.n_pairs, 2000u);
}

TEST(RectEnergy, SmallTApproachesSquaredVolume) {
  const Radii r(0.8, 0.6);
  const auto est = heis::riesz_energy_rect(r, 0.01, 50000, heis::Rng(5));
  const double vol2 = heis::rect_volume(r) * heis::rect_volume(r);
  EXPECT_NEAR(est.value, vol2, 4.0 * est.stderr_ + 0.03 * vol2);
}

TEST(RectEnergy, IsotropicScaling) {
  const double t = 1.25;
  const auto base = heis::riesz_energy_rect(Radii(0.5, 0.5), t, 60000, heis::Rng(6).stream(0));
  const auto scaled = heis::riesz_energy_rect(Radii(1.0, 1.0), t, 60000, heis::Rng(6).stream(1));
  const double factor = std::pow(2.0, 8.0 - t);
  EXPECT_NEAR(scaled.value, base.value * factor,
              3.0 * (scaled.stderr_ + base.stderr_ * factor));
}

TEST(RectEnergy, StderrShrinksLikeRootTwo) {
  // Averaged over 10 seeds at a light-tailed exponent.
  const Radii r(1, 1);
  double ratio_sum = 0.0;
  for (int s = 0; s < 10; ++s) {
    const auto small = heis::riesz_energy_rect(r, 1.5, 2000, heis::Rng(100 + s).stream(0));
    const auto large = heis::riesz_energy_rect(r, 1.5, 4000, heis::Rng(100 + s).stream(1));
    ratio_sum += large.stderr_ / small.stderr_;
  }
  const double mean_ratio = ratio_sum / 10.0;
  EXPECT_NEAR(mean_ratio, 1.0 / std::sqrt(2.0), 0.2 / std::sqrt(2.0));
}

TEST(RectEnergy, RejectsBadArguments) {
  EXPECT_THROW(heis::riesz_energy_rect(Radii(1, 1), 0.0, 2000, heis::Rng(1)), std::domain_error);
  EXPECT_THROW(heis::riesz_energy_rect(Radii(1, 1), 4.0, 2000, heis::Rng(1)), std::domain_error);
  EXPECT_THROW(heis::riesz_energy_rect(Radii(1, 1), 1.0, 10, heis::Rng(1)),
               std::invalid_argument);
}

TEST(BallEnergy, SmallTApproachesSquaredVolume) {
  const double rho = 1.0;
  const auto est = heis::riesz_energy_ball(rho, 0.01, 50000, heis::Rng(8));
  // lambda(B(0,1)) = pi^2/2; the estimate uses its own acceptance-rate volume.
  const double vol = heis::kPi * heis::kPi / 2.0;
  EXPECT_NEAR(est.value, vol * vol, 0.05 * vol * vol);
}

TEST(BallEnergy, DoublingRhoScalesByTwoToEightMinusT) {
  const double t = 1.0;
  const auto small = heis::riesz_energy_ball(1.0, t, 60000, heis::Rng(9).stream(0));
  const auto large = heis::riesz_energy_ball(2.0, t, 60000, heis::Rng(9).stream(1));
  const double factor = std::pow(2.0, 8.0 - t);
  EXPECT_NEAR(large.value / small.value, factor, 0.06 * factor);
}

TEST(CapacityLowerBound, DefinitionAndScaling) {
  const Radii r(0.5, 0.5);
  const auto est = heis::riesz_energy_rect(r, 1.5, 20000, heis::Rng(10));
  const double cap = heis::capacity_lower_bound(r, 1.5, est);
  const double vol = heis::rect_volume(r);
  EXPECT_DOUBLE_EQ(cap, vol * vol / est.value);

  // Isotropic scaling: the lower bound behaves like c^t.
  const auto est2 = heis::riesz_energy_rect(Radii(1, 1), 1.5, 20000, heis::Rng(11));
  const double cap2 = heis::capacity_lower_bound(Radii(1, 1), 1.5, est2);
  EXPECT_NEAR(cap2 / cap, std::pow(2.0, 1.5), 0.2 * std::pow(2.0, 1.5));
}

TEST(KernelComparability, RatiosWithinBracket) {
  for (double rho : {0.0, 0.5, 1.0}) {
    for (double z0 : {0.0, 0.5}) {
      const auto report = heis::kernel_comparability(rho, z0, 3000, heis::Rng(12));
      EXPECT_GE(report.min_ratio, 0.5) << "rho=" << rho << " z0=" << z0;
      EXPECT_LE(report.max_ratio, 2.0) << "rho=" << rho << " z0=" << z0;
      // Exact bracket is [1, 5^(1/4)].
      EXPECT_GE(report.min_ratio, 1.0 - 1e-12);
      EXPECT_LE(report.max_ratio, std::pow(5.0, 0.25) + 1e-12);
    }
  }
}

}  // namespace
