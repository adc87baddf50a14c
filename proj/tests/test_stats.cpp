#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "heis/stats.hpp"

namespace {

TEST(KahanSum, RecoversCancellation) {
  heis::KahanSum s;
  s.add(1.0);
  for (int i = 0; i < 10000000; ++i) s.add(1e-16);
  EXPECT_DOUBLE_EQ(s.value(), 1.0 + 1e-9);
}

TEST(MeanVar, PairwiseMatchesTwoPass) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs(5001);
  for (auto& x : xs) x = 1e6 + u(gen);
  const heis::MeanVar mv = heis::pairwise_mean_var(xs);
  heis::KahanSum sum;
  for (double x : xs) sum.add(x);
  const double mean = sum.value() / static_cast<double>(xs.size());
  double m2 = 0.0;
  for (double x : xs) m2 += (x - mean) * (x - mean);
  EXPECT_EQ(mv.n, xs.size());
  EXPECT_NEAR(mv.mean, mean, 1e-9);
  EXPECT_NEAR(mv.m2, m2, 1e-4 * m2);
}

TEST(MeanVar, MergeMatchesFlat) {
  std::vector<double> xs = {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
  const auto whole = heis::pairwise_mean_var(xs);
  const auto left = heis::pairwise_mean_var(std::span<const double>(xs).first(3));
  const auto right = heis::pairwise_mean_var(std::span<const double>(xs).subspan(3));
  const auto merged = heis::MeanVar::merge(left, right);
  EXPECT_NEAR(merged.mean, whole.mean, 1e-12);
  EXPECT_NEAR(merged.m2, whole.m2, 1e-9);
}

TEST(LineFit, ExactLine) {
  std::vector<double> x, y;
  for (int i = 1; i <= 6; ++i) {
    x.push_back(i);
    y.push_back(2.0 + 0.5 * i);
  }
  const auto fit = heis::fit_line(x, y);
  EXPECT_DOUBLE_EQ(fit.slope, 0.5);
  EXPECT_DOUBLE_EQ(fit.intercept, 2.0);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
  EXPECT_NEAR(fit.max_abs_residual, 0.0, 1e-12);
}

TEST(LineFit, RejectsDegenerateInput) {
  std::vector<double> one = {1.0};
  EXPECT_THROW(heis::fit_line(one, one), std::invalid_argument);
  std::vector<double> x = {2.0, 2.0, 2.0}, y = {1.0, 2.0, 3.0};
  EXPECT_THROW(heis::fit_line(x, y), std::invalid_argument);
  std::vector<double> missized = {1.0, 2.0};
  EXPECT_THROW(heis::fit_line(missized, y), std::invalid_argument);
}

}  // namespace
