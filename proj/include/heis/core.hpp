#pragma once

// First Heisenberg group H = (R^3, *) with
//   (x, y, z) * (x', y', z') = (x + x', y + y', z + z' + 2(xy' - yx')),
// the quartic gauge norm ||p|| = ((x^2 + y^2)^2 + z^2)^(1/4) and the
// left-invariant metric d(p, q) = ||p^{-1} q||. Rectangles R(p, (r1, r2)) are
// left translates of {x^2 + y^2 <= r1^2, |z| <= r2^2}; their Lebesgue volume
// is translation invariant. Uniform samplers for rectangles and gauge balls
// live here as well.

#include <cmath>
#include <stdexcept>
#include <string>

#include "heis/rng.hpp"

namespace heis {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;  // graded coordinate: scales like length^2 under dilations

  Point() = default;
  Point(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw std::domain_error("heis::Point: coordinates must be finite");
    }
  }

  bool operator==(const Point&) const = default;
};

inline Point mul(const Point& p, const Point& q) {
  return Point(p.x + q.x, p.y + q.y, p.z + q.z + 2.0 * (p.x * q.y - p.y * q.x));
}

inline Point inv(const Point& p) { return Point(-p.x, -p.y, -p.z); }

inline double gauge_norm(const Point& p) {
  const double s2 = p.x * p.x + p.y * p.y;
  return std::pow(s2 * s2 + p.z * p.z, 0.25);
}

inline double dist(const Point& p, const Point& q) { return gauge_norm(mul(inv(p), q)); }

// Planar Euclidean distance between the projections; a lower bound for dist,
// with equality exactly on the horizontal plane H(p).
inline double planar_dist(const Point& p, const Point& q) {
  return std::hypot(q.x - p.x, q.y - p.y);
}

// H(p) = { q : z_q = z_p + 2(x_p y_q - y_p x_q) }, tested with tolerance
// 1e-9 * (1 + |z_p| + |z_q|). The residual is antisymmetric in (p, q), so the
// test is symmetric.
inline bool in_horizontal_plane(const Point& p, const Point& q) {
  const double residual = q.z - p.z - 2.0 * (p.x * q.y - p.y * q.x);
  const double tol = 1e-9 * (1.0 + std::abs(p.z) + std::abs(q.z));
  return std::abs(residual) <= tol;
}

struct Radii {
  double r1 = 1.0;  // horizontal radius
  double r2 = 1.0;  // square root of the vertical half-extent

  Radii() = default;
  Radii(double r1_, double r2_) : r1(r1_), r2(r2_) {
    if (!(r1 > 0.0) || !(r2 > 0.0) || !std::isfinite(r1) || !std::isfinite(r2)) {
      throw std::domain_error("heis::Radii: r1 and r2 must be finite and positive");
    }
  }

  bool operator==(const Radii&) const = default;
};

struct Rect {
  Point center;
  Radii radii;
};

// Closed-set membership; equivalent to testing inv(center) * q against the
// origin rectangle.
inline bool rect_contains(const Rect& r, const Point& q) {
  const Point local = mul(inv(r.center), q);
  const double s2 = local.x * local.x + local.y * local.y;
  return s2 <= r.radii.r1 * r.radii.r1 && std::abs(local.z) <= r.radii.r2 * r.radii.r2;
}

// Lebesgue volume: disk area pi r1^2 times vertical extent 2 r2^2.
inline double rect_volume(const Radii& r) {
  return 2.0 * kPi * r.r1 * r.r1 * r.r2 * r.r2;
}

// Every p in R(0, r) has gauge norm at most (r1^4 + r2^4)^(1/4), which is at
// most 2^(1/4) max(r1, r2); the triangle inequality doubles that.
inline double rect_diameter_bound(const Radii& r) {
  return std::pow(2.0, 1.25) * std::max(r.r1, r.r2);
}

// Uniform point of the origin-centered rectangle, in rectangle coordinates:
// (x, y) uniform on the r1-disk by rejection, z uniform on [-r2^2, r2^2].
inline Point sample_rect_local(const Radii& r, Rng& rng) {
  double ux, uy;
  do {
    ux = rng.uniform(-1.0, 1.0);
    uy = rng.uniform(-1.0, 1.0);
  } while (ux * ux + uy * uy > 1.0);
  const double z = rng.uniform(-1.0, 1.0) * r.r2 * r.r2;
  return Point(ux * r.r1, uy * r.r1, z);
}

// Uniform w.r.t. Lebesgue measure on R(center, r): sample at the origin, then
// left-translate (Lebesgue measure is invariant under translations).
inline Point sample_rect(const Rect& rect, Rng& rng) {
  return mul(rect.center, sample_rect_local(rect.radii, rng));
}

struct BallSampleStats {
  std::uint64_t attempts = 0;
  std::uint64_t accepted = 0;

  double acceptance_rate() const {
    return attempts > 0 ? static_cast<double>(accepted) / static_cast<double>(attempts) : 0.0;
  }
};

// Uniform point of the gauge ball B(center, rho) by rejection from the
// enclosing rectangle R(center, (rho, rho)). The acceptance rate is the
// volume ratio lambda(B(0,1)) / lambda(R(0,(1,1))), independent of rho by
// homogeneity of the gauge under (x, y, z) -> (sx, sy, s^2 z).
inline Point sample_ball(const Point& center, double rho, Rng& rng,
                         BallSampleStats* stats = nullptr) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::domain_error("heis::sample_ball: rho must be finite and positive");
  }
  const Radii box(rho, rho);
  for (;;) {
    const Point q = sample_rect_local(box, rng);
    if (stats) ++stats->attempts;
    if (gauge_norm(q) <= rho) {
      if (stats) ++stats->accepted;
      return mul(center, q);
    }
  }
}

}  // namespace heis
