#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "heis/limsup.hpp"

namespace {

using heis::CellIndex;
using heis::Grid;
using heis::Point;
using heis::PowerLawSeq;
using heis::Window;

TEST(Grid, CellMembershipRoundTrip) {
  const Grid grid(0.25, Point(0.01, -0.02, 0.005));
  heis::Rng rng(41);
  for (int it = 0; it < 2000; ++it) {
    const Point p(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const CellIndex c = grid.cell_of(p);
    // p must equal cell_point(c, u, v, w) for some local fractions in [0,1).
    const Point base = grid.cell_point(c, 0, 0, 0);
    const double u = (p.x - base.x) / grid.delta;
    const double v = (p.y - base.y) / grid.delta;
    EXPECT_GE(u, -1e-12);
    EXPECT_LT(u, 1.0 + 1e-12);
    EXPECT_GE(v, -1e-12);
    EXPECT_LT(v, 1.0 + 1e-12);
    const double tz = grid.twisted_z(c.i, c.j, p.x, p.y, p.z);
    const double w = tz / grid.vstep() - static_cast<double>(c.l);
    EXPECT_GE(w, -1e-9);
    EXPECT_LT(w, 1.0 + 1e-9);
  }
}

TEST(Grid, CellsAreMetricallySmall) {
  // Pairs within one cell stay within C_grid * delta even far from the axis,
  // which is the point of the twisted cells.
  const Grid grid(1.0 / 64.0);
  heis::Rng rng(42);
  double worst = 0.0;
  for (int it = 0; it < 10000; ++it) {
    const CellIndex c{static_cast<std::int64_t>(rng.next_u64() % 128),
                      static_cast<std::int64_t>(rng.next_u64() % 128),
                      static_cast<std::int64_t>(rng.next_u64() % 64)};
    const Point a = grid.cell_point(c, rng.uniform(), rng.uniform(), rng.uniform());
    const Point b = grid.cell_point(c, rng.uniform(), rng.uniform(), rng.uniform());
    worst = std::max(worst, heis::dist(a, b) / grid.delta);
  }
  EXPECT_LE(worst, 4.0);
  EXPECT_LE(worst, std::pow(29.0, 0.25) + 0.01);  // analytic cell diameter
}

TEST(SampleCenters, InsideAndDeterministic) {
  const Window w(0, 1, 0, 2, -1, 1);
  const auto a = heis::sample_centers(w, 5000, heis::Rng(7));
  const auto b = heis::sample_centers(w, 5000, heis::Rng(7));
  ASSERT_EQ(a.size(), 5000u);
  heis::KahanSum sx;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_TRUE(w.contains(a[i]));
    EXPECT_EQ(a[i], b[i]);
    sx.add(a[i].x);
  }
  EXPECT_NEAR(sx.value() / 5000.0, 0.5, 3.0 / std::sqrt(12.0 * 5000.0));
}

TEST(OccupiedCells, AlignedUnitRectHitsFewCells) {
  // Rectangle centered on a lattice point: no relative shear, ball-like count.
  const Grid grid(0.1, Point());
  const std::vector<Point> centers = {Point(0.5, 0.5, 0.02)};
  const PowerLawSeq seq(1.0, 1.0);  // r_1 = (1, 1) scaled below via n = 10
  // Use n = 1 with radii from a sequence chosen to give r ~ delta: alpha such
  // that 1^-a = 0.1 is impossible, so instead test through a direct window of
  // indices with radii equal to delta via n = 10, alpha = beta = 1.
  const std::vector<Point> padded(10, centers[0]);
  const auto count = heis::occupied_cells(padded, seq, 10, 10, grid);
  EXPECT_GE(count, 1u);
  EXPECT_LE(count, 27u);
}

TEST(OccupiedCells, CountsAreMonotoneAndAdditiveForFarRects) {
  const Grid grid(0.05, Point());
  const PowerLawSeq seq(0.5, 0.5);
  std::vector<Point> centers = {Point(0.2, 0.2, 0.0), Point(5.0, 5.0, 3.0),
                                Point(-4.0, 2.0, -2.0)};
  // Scale down via large indices: use the same centers repeated.
  const auto one = heis::occupied_cells(centers, seq, 1, 1, grid);
  const auto two = heis::occupied_cells(centers, seq, 1, 2, grid);
  const auto three = heis::occupied_cells(centers, seq, 1, 3, grid);
  EXPECT_LE(one, two);
  EXPECT_LE(two, three);
  const auto only2 = heis::occupied_cells(centers, seq, 2, 2, grid);
  const auto only3 = heis::occupied_cells(centers, seq, 3, 3, grid);
  EXPECT_EQ(three, one + only2 + only3);  // far apart: no shared cells
}

TEST(OccupiedCells, ClipsToWindow) {
  const Grid grid(0.05, Point());
  const Window w(0, 1, 0, 1, 0, 1);
  const PowerLawSeq seq(0.5, 0.5);
  // Center outside the window: every probe fails the clip.
  const std::vector<Point> outside = {Point(3.0, 3.0, 3.0)};
  EXPECT_EQ(heis::occupied_cells(outside, seq, 1, 1, grid, &w), 0u);
  const std::vector<Point> inside = {Point(0.5, 0.5, 0.5)};
  EXPECT_GT(heis::occupied_cells(inside, seq, 1, 1, grid, &w), 0u);
}

TEST(OccupiedCells, ValidatesRange) {
  const Grid grid(0.1);
  const std::vector<Point> centers = {Point()};
  const PowerLawSeq seq(0.5, 0.5);
  EXPECT_THROW(heis::occupied_cells(centers, seq, 0, 1, grid), std::invalid_argument);
  EXPECT_THROW(heis::occupied_cells(centers, seq, 1, 2, grid), std::invalid_argument);
}

TEST(WindowCells, AmbientSlopeIsFour) {
  const Window w(0, 1, 0, 1, 0, 1);
  std::vector<std::pair<double, std::uint64_t>> counts;
  for (int m = 3; m <= 6; ++m) {
    const Grid grid(std::pow(2.0, -m));
    counts.emplace_back(grid.delta, heis::count_window_cells(w, grid));
  }
  const auto fit = heis::dimension_estimate(counts);
  EXPECT_NEAR(fit.slope, 4.0, 0.2);
  EXPECT_GT(fit.r2_fit, 0.999);
}

TEST(SegmentCells, VerticalSlopeIsTwo) {
  std::vector<std::pair<double, std::uint64_t>> counts;
  for (int m = 3; m <= 6; ++m) {
    const Grid grid(std::pow(2.0, -m));
    counts.emplace_back(grid.delta,
                        heis::count_vertical_segment_cells(0.31, 0.47, 0.05, 1.05, grid));
  }
  const auto fit = heis::dimension_estimate(counts);
  EXPECT_NEAR(fit.slope, 2.0, 0.2);
}

TEST(DiskCells, HorizontalDiskScalesLikeDimensionThree) {
  // The z = z0 plane is not adapted to the twist away from its characteristic
  // point, so its box-count grows like delta^-3.
  std::vector<std::pair<double, std::uint64_t>> counts;
  for (int m = 4; m <= 7; ++m) {
    const Grid grid(std::pow(2.0, -m));
    counts.emplace_back(grid.delta, heis::count_horizontal_disk_cells(0.5, 0.0, grid));
  }
  const auto fit = heis::dimension_estimate(counts);
  EXPECT_NEAR(fit.slope, 3.0, 0.15);
}

TEST(DimensionEstimate, ExactLineAndValidation) {
  std::vector<std::pair<double, std::uint64_t>> counts = {
      {0.5, 16}, {0.25, 256}, {0.125, 4096}};
  const auto fit = heis::dimension_estimate(counts);
  EXPECT_NEAR(fit.slope, 4.0, 1e-9);
  EXPECT_NEAR(fit.r2_fit, 1.0, 1e-12);

  std::vector<std::pair<double, std::uint64_t>> two = {{0.5, 4}, {0.25, 16}};
  EXPECT_THROW(heis::dimension_estimate(two), std::invalid_argument);
  std::vector<std::pair<double, std::uint64_t>> narrow = {
      {0.5, 4}, {0.4, 8}, {0.3, 16}};
  EXPECT_THROW(heis::dimension_estimate(narrow), std::invalid_argument);
}

TEST(BlockCoefficients, ConstantWeights) {
  const auto table = heis::block_coefficients([](std::uint64_t) { return 1.0; }, 10, 1 << 12);
  ASSERT_EQ(table.blocks.size(), 10u);
  std::uint64_t expected_first = 1;
  for (int n = 1; n <= 10; ++n) {
    const auto& blk = table.blocks[n - 1];
    EXPECT_EQ(blk.first, expected_first);
    EXPECT_EQ(blk.last - blk.first + 1, static_cast<std::uint64_t>(1) << n);
    EXPECT_DOUBLE_EQ(blk.coeff, std::pow(2.0, -n));
    expected_first = blk.last + 1;
  }
}

TEST(BlockCoefficients, RowSumsAndWeightedSquares) {
  const auto weight = [](std::uint64_t k) { return 1.0 + std::log(static_cast<double>(k)); };
  const auto table = heis::block_coefficients(weight, 12, 1 << 22);
  double prev = 2.0;
  for (std::uint64_t n = 1; n <= 12; ++n) {
    EXPECT_NEAR(table.row_sum(n), 1.0, 1e-12);
    const double wss = table.weighted_square_sum(n);
    EXPECT_LE(wss, std::pow(2.0, -static_cast<double>(n)));
    EXPECT_LT(wss, prev);
    prev = wss;
  }
}

TEST(BlockCoefficients, TableLookup) {
  const auto table = heis::block_coefficients([](std::uint64_t) { return 1.0; }, 3, 100);
  EXPECT_DOUBLE_EQ(table.at(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(table.at(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(table.at(1, 3), 0.0);  // outside block 1
  EXPECT_DOUBLE_EQ(table.at(2, 3), 0.25);
}

TEST(BlockCoefficients, HorizonErrorNamesShortfall) {
  try {
    heis::block_coefficients([](std::uint64_t) { return 1.0; }, 10, 100);
    FAIL() << "expected horizon error";
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("horizon"), std::string::npos);
    EXPECT_NE(msg.find("100"), std::string::npos);
  }
}

TEST(BlockCoefficients, RejectsBadWeights) {
  EXPECT_THROW(heis::block_coefficients([](std::uint64_t) { return 0.0; }, 2, 100),
               std::domain_error);
}

}  // namespace
