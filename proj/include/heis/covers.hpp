#pragma once

// Explicit covers of the rectangle R(0, r) by metric balls, following the
// content upper bound H^t_inf(R) <= C Phi^t(r):
//
//   Trivial     one ball of radius 2^(5/4) max(r1, r2) around the center.
//   SegmentNet  (thin case r1 <= r2) balls of radius 2 r1 on the vertical
//               lattice (0, 0, k r1^2), |k| <= floor(r2^2 / r1^2); the lattice
//               is 2 r1-dense in R.
//   Annulus     (flat case r1 >= r2) a segment net covering R(0, (r2, r2))
//               plus, for k = 1..ceil((r1/r2)^2), points on the circle of
//               radius rho_k = r2 sqrt(k) at angle step eps_k^2 / (2 rho_k^2)
//               with eps_k = r2^2 / rho_k; each circle net is 3 r2^2 / rho_k
//               dense in the annulus of mid radius rho_k, and the annuli
//               together with the central rectangle cover R.
//
// Annulus covers can reach ~(r1/r2)^6 elements, far too many to materialize,
// so a cover stores element groups (explicit points, a vertical lattice, or a
// parametric circle net) and answers nearest-center queries analytically.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <variant>
#include <vector>

#include "heis/core.hpp"
#include "heis/rng.hpp"
#include "heis/stats.hpp"

namespace heis {

// floor/ceil with a 1e-12 relative guard: values within that margin of an
// integer are treated as the integer, so e.g. (1/0.1)^2 = 99.99999999999998
// still yields floor 100.
inline std::int64_t floor_with_guard(double v) {
  return static_cast<std::int64_t>(std::floor(v * (1.0 + 1e-12)));
}

inline std::int64_t ceil_with_guard(double v) {
  return static_cast<std::int64_t>(std::ceil(v * (1.0 - 1e-12)));
}

enum class CoverKind { Trivial, SegmentNet, Annulus };

inline const char* to_string(CoverKind k) {
  switch (k) {
    case CoverKind::Trivial: return "Trivial";
    case CoverKind::SegmentNet: return "SegmentNet";
    case CoverKind::Annulus: return "Annulus";
  }
  return "?";
}

struct PointSet {
  std::vector<Point> centers;
};

// Centers (0, 0, k * spacing) for k in [k_min, k_max].
struct VerticalLattice {
  double spacing = 1.0;
  std::int64_t k_min = 0;
  std::int64_t k_max = 0;
};

// Centers (rho cos(j h), rho sin(j h), 0) for j in [0, last], h = angle_step.
struct CircleNet {
  double rho = 1.0;
  double angle_step = 1.0;
  std::uint64_t last = 0;
};

// One metric ball of the cover.
struct CoverElement {
  Point center;
  double radius = 1.0;
  double diameter_bound = 2.0;  // = 2 * radius
};

struct ElementGroup {
  double radius = 1.0;  // all elements of a group share one ball radius
  std::variant<PointSet, VerticalLattice, CircleNet> layout;

  std::uint64_t count() const {
    if (const auto* p = std::get_if<PointSet>(&layout)) return p->centers.size();
    if (const auto* v = std::get_if<VerticalLattice>(&layout)) {
      return static_cast<std::uint64_t>(v->k_max - v->k_min + 1);
    }
    return std::get<CircleNet>(layout).last + 1;
  }
};

struct Cover {
  std::vector<ElementGroup> groups;
  Rect target;
  double density_claim = 0.0;  // every target point is within this of a center
  CoverKind construction = CoverKind::Trivial;

  std::uint64_t element_count() const {
    std::uint64_t n = 0;
    for (const auto& g : groups) n += g.count();
    return n;
  }

  double min_element_radius() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& g : groups) r = std::min(r, g.radius);
    return r;
  }

  // Explicit element list, for small covers. Annulus covers grow like
  // (r1/r2)^6 elements, hence the cap.
  std::vector<CoverElement> materialize(std::uint64_t limit = 1u << 22) const {
    if (element_count() > limit) {
      throw std::length_error("heis::Cover::materialize: element count exceeds limit");
    }
    std::vector<CoverElement> out;
    out.reserve(element_count());
    for (const auto& g : groups) {
      auto push = [&](const Point& p) { out.push_back({p, g.radius, 2.0 * g.radius}); };
      if (const auto* ps = std::get_if<PointSet>(&g.layout)) {
        for (const auto& p : ps->centers) push(p);
      } else if (const auto* v = std::get_if<VerticalLattice>(&g.layout)) {
        for (auto k = v->k_min; k <= v->k_max; ++k) {
          push(Point(0.0, 0.0, static_cast<double>(k) * v->spacing));
        }
      } else {
        const auto& net = std::get<CircleNet>(g.layout);
        for (std::uint64_t j = 0; j <= net.last; ++j) {
          const double theta = static_cast<double>(j) * net.angle_step;
          push(Point(net.rho * std::cos(theta), net.rho * std::sin(theta), 0.0));
        }
      }
    }
    return out;
  }
};

namespace detail {

inline double point_set_nearest(const PointSet& ps, const Point& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : ps.centers) best = std::min(best, dist(c, q));
  return best;
}

// d((0,0,w), q)^4 = (x^2+y^2)^2 + (z-w)^2 is monotone in |z - w|, so the
// nearest lattice point is the nearest multiple of the spacing.
inline double vertical_lattice_nearest(const VerticalLattice& v, const Point& q) {
  std::int64_t k = static_cast<std::int64_t>(std::llround(q.z / v.spacing));
  k = std::clamp(k, v.k_min, v.k_max);
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t kk = std::max(v.k_min, k - 1); kk <= std::min(v.k_max, k + 1); ++kk) {
    best = std::min(best, dist(Point(0.0, 0.0, static_cast<double>(kk) * v.spacing), q));
  }
  return best;
}

inline double circle_net_point_dist(const CircleNet& net, std::uint64_t j, const Point& q) {
  const double theta = static_cast<double>(j) * net.angle_step;
  return dist(Point(net.rho * std::cos(theta), net.rho * std::sin(theta), 0.0), q);
}

// Exact nearest distance from q to the net, provided it is below `bound`;
// otherwise the return value is only guaranteed to be >= bound. Candidates
// come from two necessary conditions for d(c, q) < B with c on the circle at
// angle gap D = phi - theta:
//   planar:   s^2 + rho^2 - 2 rho s cos D < B^2
//   vertical: |z - 2 rho s sin D| < B^2
// (d^4 is the square of the first expression plus the square of the second's
// argument, so d dominates each contribution separately.)
inline double circle_net_nearest(const CircleNet& net, const Point& q, double bound) {
  const double s = std::hypot(q.x, q.y);
  const double h = net.angle_step;
  const std::int64_t m = static_cast<std::int64_t>(net.last);
  double best = bound;

  auto try_index = [&](std::int64_t j) {
    if (j < 0 || j > m) return;
    best = std::min(best, circle_net_point_dist(net, static_cast<std::uint64_t>(j), q));
  };

  if (s * net.rho == 0.0) {
    // q on the vertical axis: every net point is equidistant.
    return std::min(best, circle_net_point_dist(net, 0, q));
  }

  const double phi_angle = std::atan2(q.y, q.x);  // (-pi, pi]
  const double phi_pos = phi_angle < 0.0 ? phi_angle + kTwoPi : phi_angle;

  // Prime the bound with concrete candidates: the nearest net angle, and the
  // angles where the vertical term vanishes (sin D = z / (2 rho s)).
  const std::int64_t j_angle = static_cast<std::int64_t>(std::floor(phi_pos / h));
  try_index(j_angle - 1);
  try_index(j_angle);
  try_index(j_angle + 1);
  try_index(0);
  try_index(m);
  const double sin_root = q.z / (2.0 * net.rho * s);
  if (std::abs(sin_root) <= 1.0) {
    for (double delta : {std::asin(sin_root), kPi - std::asin(sin_root)}) {
      double theta = phi_angle - delta;
      theta -= kTwoPi * std::floor(theta / kTwoPi);  // [0, 2 pi)
      const std::int64_t j = static_cast<std::int64_t>(std::floor(theta / h));
      try_index(j);
      try_index(j + 1);
    }
  }

  // Candidate enumeration at the primed bound.
  const double b2 = best * best;
  const double denom = 2.0 * net.rho * s;
  const double c0 = (s * s + net.rho * net.rho - b2) / denom;
  if (c0 >= 1.0) return best;  // planar term alone excludes the whole ring
  const double half_width = c0 <= -1.0 ? kPi : std::acos(c0);

  const double u = std::max(-1.0, (q.z - b2) / denom);
  const double v = std::min(1.0, (q.z + b2) / denom);
  if (u > v) return best;  // vertical term excludes the whole ring

  const double a_lo = std::asin(u), a_hi = std::asin(v);
  struct Interval {
    double lo, hi;
  };
  const Interval arcs[2] = {{a_lo, a_hi}, {kPi - a_hi, kPi - a_lo}};

  for (const auto& arc : arcs) {
    for (int shift = -1; shift <= 1; ++shift) {
      const double lo = std::max(arc.lo + shift * kTwoPi, -half_width);
      const double hi = std::min(arc.hi + shift * kTwoPi, half_width);
      if (lo > hi) continue;
      // Angle-gap interval [lo, hi] maps to theta in [phi - hi, phi - lo].
      const double th_lo = phi_angle - hi, th_hi = phi_angle - lo;
      for (int wrap = 0; wrap <= 1; ++wrap) {
        const double w_lo = th_lo + wrap * kTwoPi;
        const double w_hi = th_hi + wrap * kTwoPi;
        if (w_hi < -h || w_lo > kTwoPi + h) continue;
        const std::int64_t j_lo =
            std::max<std::int64_t>(static_cast<std::int64_t>(std::floor(w_lo / h)) - 1, 0);
        const std::int64_t j_hi =
            std::min<std::int64_t>(static_cast<std::int64_t>(std::ceil(w_hi / h)) + 1, m);
        for (std::int64_t j = j_lo; j <= j_hi; ++j) {
          best = std::min(best, circle_net_point_dist(net, static_cast<std::uint64_t>(j), q));
        }
      }
    }
  }
  return best;
}

inline double group_nearest(const ElementGroup& g, const Point& q, double bound) {
  if (const auto* p = std::get_if<PointSet>(&g.layout)) {
    return std::min(bound, point_set_nearest(*p, q));
  }
  if (const auto* v = std::get_if<VerticalLattice>(&g.layout)) {
    return std::min(bound, vertical_lattice_nearest(*v, q));
  }
  return circle_net_nearest(std::get<CircleNet>(g.layout), q, bound);
}

}  // namespace detail

// Exact distance from q to the nearest cover center. The query point is
// translated into the target's local frame first (constructions are built
// around the origin). Circle-net groups are visited outward from the ring
// radially closest to q and pruned with d >= | |q|_planar - rho |.
inline double nearest_center_dist(const Cover& cover, const Point& q_world) {
  const Point q = mul(inv(cover.target.center), q_world);
  double best = std::numeric_limits<double>::infinity();

  std::vector<const ElementGroup*> rings;
  rings.reserve(cover.groups.size());
  for (const auto& g : cover.groups) {
    if (std::holds_alternative<CircleNet>(g.layout)) {
      rings.push_back(&g);
    } else {
      best = detail::group_nearest(g, q, best);
    }
  }
  if (rings.empty()) return best;

  // Rings are stored with increasing rho by construction.
  const double s = std::hypot(q.x, q.y);
  auto rho_of = [&](std::size_t i) { return std::get<CircleNet>(rings[i]->layout).rho; };
  std::size_t lo = 0, hi = rings.size();
  while (lo < hi) {  // first ring with rho >= s
    const std::size_t mid = (lo + hi) / 2;
    if (rho_of(mid) < s) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  std::int64_t left = static_cast<std::int64_t>(lo) - 1;
  std::size_t right = lo;
  while (true) {
    const bool has_left = left >= 0 && s - rho_of(static_cast<std::size_t>(left)) < best;
    const bool has_right = right < rings.size() && rho_of(right) - s < best;
    if (!has_left && !has_right) break;
    // Visit the radially closer side first so the bound shrinks fastest.
    const double dl = has_left ? s - rho_of(static_cast<std::size_t>(left))
                               : std::numeric_limits<double>::infinity();
    const double dr = has_right ? rho_of(right) - s : std::numeric_limits<double>::infinity();
    if (dl <= dr) {
      best = detail::group_nearest(*rings[static_cast<std::size_t>(left)], q, best);
      --left;
    } else {
      best = detail::group_nearest(*rings[right], q, best);
      ++right;
    }
  }
  return best;
}

// --- Constructions ----------------------------------------------------------

inline Cover trivial_cover(const Radii& r) {
  Cover c;
  c.construction = CoverKind::Trivial;
  c.target = Rect{Point(), r};
  const double radius = rect_diameter_bound(r);
  c.groups.push_back({radius, PointSet{{Point()}}});
  c.density_claim = radius;
  return c;
}

inline Cover segment_net(const Radii& r) {
  if (r.r1 > r.r2) {
    throw std::invalid_argument("heis::segment_net: requires r1 <= r2 (thin case)");
  }
  Cover c;
  c.construction = CoverKind::SegmentNet;
  c.target = Rect{Point(), r};
  const std::int64_t k = floor_with_guard((r.r2 / r.r1) * (r.r2 / r.r1));
  c.groups.push_back({2.0 * r.r1, VerticalLattice{r.r1 * r.r1, -k, k}});
  c.density_claim = 2.0 * r.r1;
  return c;
}

namespace detail {

inline CircleNet make_circle_net(double rho, double eps) {
  if (!(rho > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("heis::circle_net: rho and eps must be positive");
  }
  CircleNet net;
  net.rho = rho;
  net.angle_step = eps * eps / (2.0 * rho * rho);
  net.last = static_cast<std::uint64_t>(std::floor(4.0 * kPi * rho * rho / (eps * eps)));
  return net;
}

}  // namespace detail

// The eps-dense net of the circle of radius rho in the z = 0 plane: angles
// k eps^2 / (2 rho^2) for k = 0..floor(4 pi rho^2 / eps^2). Adjacent points
// at angle gap a satisfy d = 2^(3/4) rho (1 - cos a)^(1/4) <= rho sqrt(2 a).
inline std::vector<Point> circle_net(double rho, double eps) {
  const CircleNet net = detail::make_circle_net(rho, eps);
  std::vector<Point> pts;
  pts.reserve(net.last + 1);
  for (std::uint64_t j = 0; j <= net.last; ++j) {
    const double theta = static_cast<double>(j) * net.angle_step;
    pts.emplace_back(rho * std::cos(theta), rho * std::sin(theta), 0.0);
  }
  return pts;
}

inline Cover annulus_cover(const Radii& r) {
  if (r.r1 < r.r2) {
    throw std::invalid_argument("heis::annulus_cover: requires r1 >= r2 (flat case)");
  }
  Cover c;
  c.construction = CoverKind::Annulus;
  c.target = Rect{Point(), r};
  // Central rectangle R(0, (r2, r2)) via its segment net: 3 balls of radius 2 r2.
  c.groups.push_back({2.0 * r.r2, VerticalLattice{r.r2 * r.r2, -1, 1}});
  double claim = 2.0 * r.r2;
  const double ratio = r.r1 / r.r2;
  const std::int64_t rings = std::max<std::int64_t>(ceil_with_guard(ratio * ratio), 1);
  for (std::int64_t k = 1; k <= rings; ++k) {
    const double rho = r.r2 * std::sqrt(static_cast<double>(k));
    const double eps = r.r2 * r.r2 / rho;
    const double density = 3.0 * r.r2 * r.r2 / rho;  // sqrt(2)+1 rounded up to 3
    c.groups.push_back({density, detail::make_circle_net(rho, eps)});
    claim = std::max(claim, density);
  }
  c.density_claim = claim;
  return c;
}

// Case table of the content proof: thin rectangles use the segment net once
// t exceeds 2, flat ones use the annulus cover once t exceeds 3; otherwise a
// single ball already realizes the bound. Ties r1 == r2 take the flat route
// (both case families give the same Phi there).
inline Cover build_cover(const Radii& r, double t) {
  if (!(t >= 0.0) || !(t <= 4.0)) {
    throw std::domain_error("heis::build_cover: t must lie in [0, 4]");
  }
  if (r.r1 < r.r2) {
    return t <= 2.0 ? trivial_cover(r) : segment_net(r);
  }
  return t <= 3.0 ? trivial_cover(r) : annulus_cover(r);
}

// sum over elements of diameter^t with diameter = 2 * ball radius; an upper
// estimate of H^t_inf(target) once the density claim is verified.
inline double content(const Cover& cover, double t) {
  if (!(t >= 0.0)) throw std::domain_error("heis::content: t must be >= 0");
  KahanSum sum;
  for (const auto& g : cover.groups) {
    sum.add(static_cast<double>(g.count()) * std::pow(2.0 * g.radius, t));
  }
  return sum.value();
}

struct DensityReport {
  double max_gap = 0.0;
  std::uint64_t violations = 0;
};

// Samples the target rectangle and measures the distance to the nearest cover
// center. Per-sample RNG streams make the report independent of evaluation
// order (max and count are commutative reductions).
inline DensityReport verify_density(const Cover& cover, std::uint64_t n_samples,
                                    const Rng& base) {
  if (n_samples < 1) throw std::invalid_argument("heis::verify_density: need n_samples >= 1");
  DensityReport report;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    Rng rng = base.stream(i);
    const Point q = sample_rect(cover.target, rng);
    const double gap = nearest_center_dist(cover, q);
    report.max_gap = std::max(report.max_gap, gap);
    if (gap > cover.density_claim) ++report.violations;
  }
  return report;
}

}  // namespace heis
