#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "heis/covers.hpp"
#include "heis/svf.hpp"

namespace {

using heis::CircleNet;
using heis::Cover;
using heis::CoverKind;
using heis::Point;
using heis::Radii;
using heis::VerticalLattice;

double brute_nearest(const std::vector<Point>& centers, const Point& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : centers) best = std::min(best, heis::dist(c, q));
  return best;
}

TEST(TrivialCover, SingleBallAtDiameterBound) {
  const Cover c = heis::trivial_cover(Radii(1, 1));
  EXPECT_EQ(c.construction, CoverKind::Trivial);
  EXPECT_EQ(c.element_count(), 1u);
  EXPECT_DOUBLE_EQ(c.density_claim, std::pow(2.0, 1.25));
  EXPECT_DOUBLE_EQ(heis::content(c, 0.0), 1.0);
  for (double t : {0.5, 1.7, 3.2}) {
    EXPECT_DOUBLE_EQ(heis::content(c, t), std::pow(2.0 * std::pow(2.0, 1.25), t));
  }
}

TEST(TrivialCover, ContentScalesWithMaxRadius) {
  const double t = 1.3;
  const double base = heis::content(heis::trivial_cover(Radii(0.2, 0.1)), t);
  const double scaled = heis::content(heis::trivial_cover(Radii(0.4, 0.2)), t);
  EXPECT_NEAR(scaled / base, std::pow(2.0, t), 1e-12);
}

TEST(SegmentNet, UnitExample) {
  const Cover c = heis::segment_net(Radii(1, 1));
  EXPECT_EQ(c.element_count(), 3u);
  EXPECT_DOUBLE_EQ(c.density_claim, 2.0);
  const auto elements = c.materialize();
  ASSERT_EQ(elements.size(), 3u);
  EXPECT_EQ(elements[0].center, Point(0, 0, -1));
  EXPECT_EQ(elements[1].center, Point(0, 0, 0));
  EXPECT_EQ(elements[2].center, Point(0, 0, 1));
  for (const auto& e : elements) {
    EXPECT_DOUBLE_EQ(e.radius, 2.0);
    EXPECT_DOUBLE_EQ(e.diameter_bound, 2.0 * e.radius);
  }
}

TEST(SegmentNet, ThinExampleCountAndContent) {
  const Cover c = heis::segment_net(Radii(0.1, 1.0));
  EXPECT_EQ(c.element_count(), 201u);  // floor guard rescues (1/0.1)^2
  EXPECT_NEAR(heis::content(c, 3.0), 201.0 * std::pow(0.4, 3.0), 1e-12 * 12.864);
}

TEST(SegmentNet, RejectsFlatRadii) {
  EXPECT_THROW(heis::segment_net(Radii(1.0, 0.5)), std::invalid_argument);
}

TEST(SegmentNet, CountSlopeIsTwo) {
  std::vector<double> x, y;
  for (int m = 2; m <= 8; ++m) {
    const double r1 = std::pow(2.0, -m);
    const Cover c = heis::segment_net(Radii(r1, 1.0));
    x.push_back(std::log(1.0 / r1));
    y.push_back(std::log(static_cast<double>(c.element_count())));
  }
  const auto fit = heis::fit_line(x, y);
  EXPECT_NEAR(fit.slope, 2.0, 0.05);
}

TEST(CircleNet, CountAndAdjacentDensity) {
  const double rho = 1.7, eps = 0.23;
  const auto pts = heis::circle_net(rho, eps);
  const auto expected =
      static_cast<std::uint64_t>(std::floor(4.0 * heis::kPi * rho * rho / (eps * eps))) + 1;
  EXPECT_EQ(pts.size(), expected);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    EXPECT_LE(heis::dist(pts[i], pts[i + 1]), eps * (1.0 + 1e-12));
  }
  // The net closes the circle: last point is within one step of angle 0.
  EXPECT_LE(heis::dist(pts.back(), pts.front()), eps * (1.0 + 1e-12));
}

TEST(CircleNet, HugeEpsStillYieldsOnePoint) {
  const auto pts = heis::circle_net(0.5, 10.0);
  EXPECT_GE(pts.size(), 1u);
}

TEST(AnnulusCover, UnitExampleHasCentralPartPlusOneRing) {
  const Cover c = heis::annulus_cover(Radii(1, 1));
  ASSERT_EQ(c.groups.size(), 2u);  // central lattice + ring k = 1
  EXPECT_TRUE(std::holds_alternative<VerticalLattice>(c.groups[0].layout));
  EXPECT_TRUE(std::holds_alternative<CircleNet>(c.groups[1].layout));
  EXPECT_DOUBLE_EQ(c.density_claim, 3.0);
  EXPECT_DOUBLE_EQ(std::get<CircleNet>(c.groups[1].layout).rho, 1.0);
}

TEST(AnnulusCover, GuardedRingCount) {
  // (r1/r2)^2 lands on 4 up to roundoff; the guard must not add a fifth ring.
  const Cover c = heis::annulus_cover(Radii(0.2, 0.1));
  std::size_t rings = 0;
  for (const auto& g : c.groups) rings += std::holds_alternative<CircleNet>(g.layout);
  EXPECT_EQ(rings, 4u);
}

TEST(AnnulusCover, RejectsThinRadii) {
  EXPECT_THROW(heis::annulus_cover(Radii(0.5, 1.0)), std::invalid_argument);
}

TEST(Cover, MaterializeRespectsLimit) {
  const Cover big = heis::annulus_cover(Radii(1.0, 1.0 / 64.0));
  EXPECT_THROW(big.materialize(1000), std::length_error);
  const Cover small = heis::annulus_cover(Radii(0.5, 0.25));
  EXPECT_EQ(small.materialize().size(), small.element_count());
}

TEST(AnnulusCover, CountSlopeIsSix) {
  std::vector<double> x, y;
  for (int m = 2; m <= 8; ++m) {
    const double r2 = std::pow(2.0, -m);
    const Cover c = heis::annulus_cover(Radii(1.0, r2));
    x.push_back(std::log(1.0 / r2));
    y.push_back(std::log(static_cast<double>(c.element_count())));
  }
  const auto fit = heis::fit_line(x, y);
  EXPECT_NEAR(fit.slope, 6.0, 0.1);
}

TEST(BuildCover, CaseSelection) {
  EXPECT_EQ(heis::build_cover(Radii(0.1, 1.0), 3.0).construction, CoverKind::SegmentNet);
  EXPECT_EQ(heis::build_cover(Radii(1.0, 0.1), 1.0).construction, CoverKind::Trivial);
  EXPECT_EQ(heis::build_cover(Radii(1.0, 0.1), 3.5).construction, CoverKind::Annulus);
  EXPECT_EQ(heis::build_cover(Radii(0.1, 1.0), 1.5).construction, CoverKind::Trivial);
  EXPECT_THROW(heis::build_cover(Radii(1, 1), 4.5), std::domain_error);
}

TEST(NearestQuery, VerticalLatticeMatchesBruteForce) {
  heis::Rng rng(31);
  const Cover c = heis::segment_net(Radii(0.2, 1.0));
  const auto& lat = std::get<VerticalLattice>(c.groups.at(0).layout);
  std::vector<Point> centers;
  for (auto k = lat.k_min; k <= lat.k_max; ++k) {
    centers.emplace_back(0.0, 0.0, static_cast<double>(k) * lat.spacing);
  }
  for (int it = 0; it < 2000; ++it) {
    heis::Rng r = rng.stream(it);
    const Point q = heis::sample_rect(c.target, r);
    EXPECT_NEAR(heis::nearest_center_dist(c, q), brute_nearest(centers, q), 1e-12);
  }
}

TEST(NearestQuery, AnnulusMatchesBruteForce) {
  heis::Rng rng(32);
  for (const Radii& r : {Radii(1.0, 0.5), Radii(1.0, 0.25), Radii(0.7, 0.7)}) {
    const Cover c = heis::annulus_cover(r);
    std::vector<Point> centers;
    for (const auto& e : c.materialize()) centers.push_back(e.center);
    for (int it = 0; it < 1000; ++it) {
      heis::Rng rr = rng.stream(it);
      const Point q = heis::sample_rect(c.target, rr);
      const double fast = heis::nearest_center_dist(c, q);
      const double brute = brute_nearest(centers, q);
      ASSERT_NEAR(fast, brute, 1e-12 * (1.0 + brute))
          << "r1=" << r.r1 << " r2=" << r.r2 << " q=(" << q.x << "," << q.y << "," << q.z << ")";
    }
  }
}

TEST(NearestQuery, RandomCircleNetsMatchBruteForce) {
  // Standalone nets with random geometry and query points anywhere nearby,
  // not just inside a target rectangle.
  heis::Rng rng(35);
  for (int net_case = 0; net_case < 40; ++net_case) {
    heis::Rng nr = rng.stream(net_case);
    const double rho = nr.uniform(0.2, 2.0);
    const double eps = nr.uniform(0.05, 0.8) * rho;
    const auto pts = heis::circle_net(rho, eps);
    if (pts.size() > 20000) continue;
    Cover c;
    c.target = heis::Rect{Point(), Radii(2.0 * rho, 2.0 * rho)};
    c.construction = CoverKind::Annulus;
    c.groups.push_back(
        {eps, CircleNet{rho, eps * eps / (2.0 * rho * rho),
                        static_cast<std::uint64_t>(pts.size() - 1)}});
    c.density_claim = eps;
    for (int it = 0; it < 50; ++it) {
      const Point q(nr.uniform(-2.5 * rho, 2.5 * rho), nr.uniform(-2.5 * rho, 2.5 * rho),
                    nr.uniform(-rho * rho, rho * rho));
      ASSERT_NEAR(heis::nearest_center_dist(c, q), brute_nearest(pts, q), 1e-10)
          << "rho=" << rho << " eps=" << eps;
    }
  }
}

TEST(VerifyDensity, TrivialAndSegmentHaveNoViolations) {
  heis::Rng rng(33);
  const auto trivial = heis::verify_density(heis::trivial_cover(Radii(1, 1)), 2000, rng);
  EXPECT_EQ(trivial.violations, 0u);
  EXPECT_LE(trivial.max_gap, std::pow(2.0, 1.25));
  const auto segment = heis::verify_density(heis::segment_net(Radii(0.1, 1.0)), 10000, rng);
  EXPECT_EQ(segment.violations, 0u);
  EXPECT_LE(segment.max_gap, 0.2);
}

TEST(VerifyDensity, AnnulusHasNoViolations) {
  heis::Rng rng(34);
  const auto report = heis::verify_density(heis::annulus_cover(Radii(1.0, 0.1)), 10000, rng);
  EXPECT_EQ(report.violations, 0u);
  EXPECT_LE(report.max_gap, 0.3);
}

TEST(VerifyDensity, DeterministicGivenSeed) {
  const Cover c = heis::annulus_cover(Radii(1.0, 0.5));
  const auto a = heis::verify_density(c, 500, heis::Rng(9));
  const auto b = heis::verify_density(c, 500, heis::Rng(9));
  EXPECT_EQ(a.violations, b.violations);
  EXPECT_DOUBLE_EQ(a.max_gap, b.max_gap);
}

TEST(Content, TracksPhiOnSweep) {
  // Quick version of the content-vs-Phi regression at two exponents.
  for (double t : {1.5, 3.5}) {
    std::vector<double> x, y;
    for (int j = 0; j <= 4; ++j) {
      for (int k = 0; k <= 4; ++k) {
        const Radii r(std::pow(2.0, -j), std::pow(2.0, -k));
        x.push_back(std::log(heis::phi(t, r).value));
        y.push_back(std::log(heis::content(heis::build_cover(r, t), t)));
      }
    }
    const auto fit = heis::fit_line(x, y);
    EXPECT_NEAR(fit.slope, 1.0, 0.10) << "t=" << t;
    EXPECT_LE(fit.max_abs_residual, std::log(50.0));
  }
}

}  // namespace
