#pragma once

// Finite-stage machinery for random limsup sets: i.i.d. rectangle centers in
// a window, box counting over a grid adapted to the group structure, and the
// block-coefficient construction used to spread unit mass over index blocks.
//
// Grid cells are left translates of the model box [0,d)^2 x [0,d^2): cell
// (i,j,l) = T_ij * ([0,d)^2 x [l d^2, (l+1) d^2)) with T_ij the lattice point
// (ox + i d, oy + j d). An axis-aligned Euclidean grid would not do: two
// points of one box at planar radius s differ vertically by up to ~2 s d
// after the group twist, so only the translated cells stay metrically
// comparable to balls of radius d (diameter <= 29^(1/4) d, uniformly in
// position).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "heis/core.hpp"
#include "heis/rng.hpp"
#include "heis/stats.hpp"
#include "heis/svf.hpp"

namespace heis {

struct Window {
  double lo[3] = {0.0, 0.0, 0.0};
  double hi[3] = {1.0, 1.0, 1.0};

  Window() = default;
  Window(double x0, double x1, double y0, double y1, double z0, double z1)
      : lo{x0, y0, z0}, hi{x1, y1, z1} {
    for (int a = 0; a < 3; ++a) {
      if (!(lo[a] < hi[a]) || !std::isfinite(lo[a]) || !std::isfinite(hi[a])) {
        throw std::domain_error("heis::Window: needs a nonempty interior");
      }
    }
  }

  bool contains(const Point& p) const {
    return p.x >= lo[0] && p.x <= hi[0] && p.y >= lo[1] && p.y <= hi[1] && p.z >= lo[2] &&
           p.z <= hi[2];
  }

  double volume() const {
    return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
  }

  Point sample(Rng& rng) const {
    return Point(rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]),
                 rng.uniform(lo[2], hi[2]));
  }
};

struct CellIndex {
  std::int64_t i = 0, j = 0, l = 0;
  bool operator==(const CellIndex&) const = default;
};

struct CellIndexHash {
  std::size_t operator()(const CellIndex& c) const {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(c.i) + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ static_cast<std::uint64_t>(c.j));
    return static_cast<std::size_t>(mix64(h ^ static_cast<std::uint64_t>(c.l)));
  }
};

struct Grid {
  double delta = 0.125;  // planar step; vertical step is delta^2
  Point origin;          // lattice offsets

  Grid() = default;
  explicit Grid(double d, const Point& o = Point()) : delta(d), origin(o) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
      throw std::domain_error("heis::Grid: delta must be finite and positive");
    }
  }

  double vstep() const { return delta * delta; }

  // Planar lattice point anchoring column (i, j).
  double anchor_x(std::int64_t i) const { return origin.x + static_cast<double>(i) * delta; }
  double anchor_y(std::int64_t j) const { return origin.y + static_cast<double>(j) * delta; }

  // Twisted vertical coordinate within column (i, j).
  double twisted_z(std::int64_t i, std::int64_t j, double x, double y, double z) const {
    return (z - origin.z) - 2.0 * (anchor_x(i) * y - anchor_y(j) * x);
  }

  CellIndex cell_of(const Point& p) const {
    CellIndex c;
    c.i = static_cast<std::int64_t>(std::floor((p.x - origin.x) / delta));
    c.j = static_cast<std::int64_t>(std::floor((p.y - origin.y) / delta));
    c.l = static_cast<std::int64_t>(std::floor(twisted_z(c.i, c.j, p.x, p.y, p.z) / vstep()));
    return c;
  }

  // Point of cell c at local fractions (u, v, w) in [0, 1]^3.
  Point cell_point(const CellIndex& c, double u, double v, double w) const {
    const double tx = anchor_x(c.i), ty = anchor_y(c.j);
    const double x = tx + u * delta;
    const double y = ty + v * delta;
    const double zt = (static_cast<double>(c.l) + w) * vstep();
    return Point(x, y, origin.z + zt + 2.0 * (tx * (y - ty) - ty * (x - tx)));
  }
};

// N i.i.d. uniform points of W, reproducible per index.
inline std::vector<Point> sample_centers(const Window& w, std::uint64_t n, const Rng& base) {
  if (n < 1) throw std::invalid_argument("heis::sample_centers: need n >= 1");
  std::vector<Point> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Rng rng = base.stream(i);
    out.push_back(w.sample(rng));
  }
  return out;
}

namespace detail {

// Occupancy probe for one rectangle: cell counts as hit when its center, any
// of a 3x3x3 lattice of cell points, or the rectangle's own center lies in
// rectangle (and window, when clipping). Overcount/undercount is confined to
// a one-cell shell, which slope fits do not see.
inline bool cell_hits_rect(const Grid& grid, const CellIndex& c, const Rect& rect,
                           const Window* clip) {
  auto probe = [&](double u, double v, double w) {
    const Point p = grid.cell_point(c, u, v, w);
    return rect_contains(rect, p) && (!clip || clip->contains(p));
  };
  if (probe(0.5, 0.5, 0.5)) return true;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int d = 0; d < 3; ++d) {
        if (a == 1 && b == 1 && d == 1) continue;
        if (probe(0.5 * a, 0.5 * b, 0.5 * d)) return true;
      }
    }
  }
  return false;
}

inline void rasterize_rect(const Grid& grid, const Rect& rect, const Window* clip,
                           std::unordered_set<CellIndex, CellIndexHash>& occupied) {
  const double r1 = rect.radii.r1, r2 = rect.radii.r2;
  const Point& p = rect.center;
  if (!clip || clip->contains(p)) occupied.insert(grid.cell_of(p));

  const auto i_lo = static_cast<std::int64_t>(std::floor((p.x - r1 - grid.origin.x) / grid.delta));
  const auto i_hi = static_cast<std::int64_t>(std::floor((p.x + r1 - grid.origin.x) / grid.delta));
  const auto j_lo = static_cast<std::int64_t>(std::floor((p.y - r1 - grid.origin.y) / grid.delta));
  const auto j_hi = static_cast<std::int64_t>(std::floor((p.y + r1 - grid.origin.y) / grid.delta));
  const double vstep = grid.vstep();

  for (std::int64_t i = i_lo; i <= i_hi; ++i) {
    for (std::int64_t j = j_lo; j <= j_hi; ++j) {
      const double bx = grid.anchor_x(i), by = grid.anchor_y(j);
      // Planar prefilter: the cell square must meet the disk.
      const double nx = std::clamp(p.x, bx, bx + grid.delta);
      const double ny = std::clamp(p.y, by, by + grid.delta);
      if ((nx - p.x) * (nx - p.x) + (ny - p.y) * (ny - p.y) > r1 * r1) continue;
      // Twisted-z interval of the rectangle over this column: the sheared
      // center height is affine in (x, y), so corner values bound it.
      double c_min = std::numeric_limits<double>::infinity();
      double c_max = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const double x = bx + a * grid.delta, y = by + b * grid.delta;
          const double zc = p.z + 2.0 * (p.x * y - p.y * x);
          const double tz = grid.twisted_z(i, j, x, y, zc);
          c_min = std::min(c_min, tz);
          c_max = std::max(c_max, tz);
        }
      }
      const auto l_lo = static_cast<std::int64_t>(std::floor((c_min - r2 * r2) / vstep));
      const auto l_hi = static_cast<std::int64_t>(std::floor((c_max + r2 * r2) / vstep));
      for (std::int64_t l = l_lo; l <= l_hi; ++l) {
        const CellIndex c{i, j, l};
        if (occupied.contains(c)) continue;
        if (cell_hits_rect(grid, c, rect, clip)) occupied.insert(c);
      }
    }
  }
}

}  // namespace detail

// Number of grid cells meeting the union of rectangles R(p_n, r_n) for
// n in [n_lo, n_hi] (1-based into `centers`), clipped to the window when one
// is given.
inline std::uint64_t occupied_cells(std::span<const Point> centers, const PowerLawSeq& seq,
                                    std::uint64_t n_lo, std::uint64_t n_hi, const Grid& grid,
                                    const Window* clip = nullptr) {
  if (n_lo < 1 || n_lo > n_hi || n_hi > centers.size()) {
    throw std::invalid_argument("heis::occupied_cells: need 1 <= n_lo <= n_hi <= #centers");
  }
  std::unordered_set<CellIndex, CellIndexHash> occupied;
  for (std::uint64_t n = n_lo; n <= n_hi; ++n) {
    const Rect rect{centers[n - 1], seq.radii_at(static_cast<double>(n))};
    detail::rasterize_rect(grid, rect, clip, occupied);
  }
  return occupied.size();
}

namespace detail {

// Cells [l v, (l+1) v) meeting the closed interval [c_lo, c_hi].
inline std::uint64_t l_span_closed(double c_lo, double c_hi, double v) {
  const auto lo = static_cast<std::int64_t>(std::floor(c_lo / v));
  const auto hi = static_cast<std::int64_t>(std::floor(c_hi / v));
  return static_cast<std::uint64_t>(hi - lo + 1);
}

// Cells meeting the open interval (c_lo, c_hi): face-touching cells excluded.
inline std::uint64_t l_span_open(double c_lo, double c_hi, double v) {
  auto lo = static_cast<std::int64_t>(std::floor(c_lo / v));
  if (static_cast<double>(lo + 1) * v <= c_lo) ++lo;
  auto hi = static_cast<std::int64_t>(std::floor(c_hi / v));
  if (static_cast<double>(hi) * v >= c_hi) --hi;
  return hi >= lo ? static_cast<std::uint64_t>(hi - lo + 1) : 0;
}

// Index of the last grid column starting strictly before `edge`.
inline std::int64_t last_column_before(double edge, double offset, double step) {
  auto idx = static_cast<std::int64_t>(std::floor((edge - offset) / step));
  if (offset + static_cast<double>(idx) * step >= edge) --idx;
  return idx;
}

}  // namespace detail

// Cells meeting the open window; the ambient count, ~ delta^-4.
inline std::uint64_t count_window_cells(const Window& w, const Grid& grid) {
  const auto i_lo = static_cast<std::int64_t>(std::floor((w.lo[0] - grid.origin.x) / grid.delta));
  const auto i_hi = detail::last_column_before(w.hi[0], grid.origin.x, grid.delta);
  const auto j_lo = static_cast<std::int64_t>(std::floor((w.lo[1] - grid.origin.y) / grid.delta));
  const auto j_hi = detail::last_column_before(w.hi[1], grid.origin.y, grid.delta);
  std::uint64_t total = 0;
  for (std::int64_t i = i_lo; i <= i_hi; ++i) {
    for (std::int64_t j = j_lo; j <= j_hi; ++j) {
      const double bx = grid.anchor_x(i), by = grid.anchor_y(j);
      const double x0 = std::max(bx, w.lo[0]), x1 = std::min(bx + grid.delta, w.hi[0]);
      const double y0 = std::max(by, w.lo[1]), y1 = std::min(by + grid.delta, w.hi[1]);
      // The window's twisted-z extent over this column is the hull of the
      // per-point intervals [lo_z - s, hi_z - s]; s is affine, so corners
      // of the clipped planar box give the extremes.
      double c_min = std::numeric_limits<double>::infinity();
      double c_max = -std::numeric_limits<double>::infinity();
      for (double x : {x0, x1}) {
        for (double y : {y0, y1}) {
          c_min = std::min(c_min, grid.twisted_z(i, j, x, y, w.lo[2]));
          c_max = std::max(c_max, grid.twisted_z(i, j, x, y, w.hi[2]));
        }
      }
      total += detail::l_span_open(c_min, c_max, grid.vstep());
    }
  }
  return total;
}

// Cells meeting the vertical segment {(x0, y0)} x [z_lo, z_hi]; ~ len/delta^2.
inline std::uint64_t count_vertical_segment_cells(double x0, double y0, double z_lo, double z_hi,
                                                  const Grid& grid) {
  if (!(z_lo < z_hi)) throw std::invalid_argument("heis::count_vertical_segment_cells: empty");
  const auto i = static_cast<std::int64_t>(std::floor((x0 - grid.origin.x) / grid.delta));
  const auto j = static_cast<std::int64_t>(std::floor((y0 - grid.origin.y) / grid.delta));
  const double c_lo = grid.twisted_z(i, j, x0, y0, z_lo);
  const double c_hi = grid.twisted_z(i, j, x0, y0, z_hi);
  return detail::l_span_closed(c_lo, c_hi, grid.vstep());
}

// Cells meeting the Euclidean disk {x^2 + y^2 <= R^2, z = z0}. Away from the
// characteristic point the plane cuts across ~|p|/delta twisted cells per
// column, so this count grows like delta^-3, not delta^-2.
inline std::uint64_t count_horizontal_disk_cells(double radius, double z0, const Grid& grid) {
  if (!(radius > 0.0)) throw std::invalid_argument("heis::count_horizontal_disk_cells: radius");
  const auto i_lo = static_cast<std::int64_t>(std::floor((-radius - grid.origin.x) / grid.delta));
  const auto i_hi = detail::last_column_before(radius, grid.origin.x, grid.delta);
  const auto j_lo = static_cast<std::int64_t>(std::floor((-radius - grid.origin.y) / grid.delta));
  const auto j_hi = detail::last_column_before(radius, grid.origin.y, grid.delta);
  std::uint64_t total = 0;
  for (std::int64_t i = i_lo; i <= i_hi; ++i) {
    for (std::int64_t j = j_lo; j <= j_hi; ++j) {
      const double bx = grid.anchor_x(i), by = grid.anchor_y(j);
      const double nx = std::clamp(0.0, bx, bx + grid.delta);
      const double ny = std::clamp(0.0, by, by + grid.delta);
      if (nx * nx + ny * ny > radius * radius) continue;
      double c_min = std::numeric_limits<double>::infinity();
      double c_max = -std::numeric_limits<double>::infinity();
      for (double x : {bx, bx + grid.delta}) {
        for (double y : {by, by + grid.delta}) {
          const double tz = grid.twisted_z(i, j, x, y, z0);
          c_min = std::min(c_min, tz);
          c_max = std::max(c_max, tz);
        }
      }
      total += detail::l_span_closed(c_min, c_max, grid.vstep());
    }
  }
  return total;
}

struct DimensionFit {
  double slope = 0.0;
  double r2_fit = 0.0;
};

// OLS slope of log N(delta) against log(1/delta); needs at least 3 scales
// spanning at least 2 octaves.
inline DimensionFit dimension_estimate(
    const std::vector<std::pair<double, std::uint64_t>>& counts) {
  if (counts.size() < 3) {
    throw std::invalid_argument("heis::dimension_estimate: need >= 3 scales");
  }
  double d_min = counts.front().first, d_max = counts.front().first;
  std::vector<double> x, y;
  for (const auto& [delta, n] : counts) {
    if (!(delta > 0.0) || n == 0) {
      throw std::invalid_argument("heis::dimension_estimate: degenerate scale");
    }
    d_min = std::min(d_min, delta);
    d_max = std::max(d_max, delta);
    x.push_back(std::log(1.0 / delta));
    y.push_back(std::log(static_cast<double>(n)));
  }
  if (d_max / d_min < 4.0) {
    throw std::invalid_argument("heis::dimension_estimate: scales must span >= 2 octaves");
  }
  const LineFit fit = fit_line(x, y);
  return DimensionFit{fit.slope, fit.r2};
}

// Block coefficients a_{n,k} = a_n / b_k on consecutive blocks [M_n, N_n],
// with N_n minimal such that sum_{k=M_n}^{N_n} 1/b_k >= 2^n. Then each row
// sums to 1, a_n = 1 / (block sum) <= 2^-n, and sum_k a_{n,k}^2 b_k = a_n.
struct BlockTable {
  struct Block {
    std::uint64_t first = 0, last = 0;  // 1-based, inclusive
    double coeff = 0.0;                 // a_n
    double inv_sum = 0.0;               // sum over the block of 1/b_k
  };

  std::vector<Block> blocks;
  std::function<double(std::uint64_t)> weight;  // b_k

  double at(std::uint64_t n, std::uint64_t k) const {
    const Block& blk = blocks.at(n - 1);
    if (k < blk.first || k > blk.last) return 0.0;
    return blk.coeff / weight(k);
  }

  // Independent recomputations for the checks (not the stored inv_sum).
  double row_sum(std::uint64_t n) const {
    const Block& blk = blocks.at(n - 1);
    KahanSum s;
    for (std::uint64_t k = blk.first; k <= blk.last; ++k) s.add(blk.coeff / weight(k));
    return s.value();
  }

  double weighted_square_sum(std::uint64_t n) const {
    const Block& blk = blocks.at(n - 1);
    KahanSum s;
    for (std::uint64_t k = blk.first; k <= blk.last; ++k) {
      const double a = blk.coeff / weight(k);
      s.add(a * a * weight(k));
    }
    return s.value();
  }

  struct RowChecks {
    double row_sum = 0.0;
    double weighted_square_sum = 0.0;
  };

  // Both check sums with a single weight evaluation per index.
  RowChecks checks(std::uint64_t n) const {
    const Block& blk = blocks.at(n - 1);
    KahanSum row, square;
    for (std::uint64_t k = blk.first; k <= blk.last; ++k) {
      const double w = weight(k);
      const double a = blk.coeff / w;
      row.add(a);
      square.add(a * a * w);
    }
    return RowChecks{row.value(), square.value()};
  }
};

inline BlockTable block_coefficients(std::function<double(std::uint64_t)> b, int n_blocks,
                                     std::uint64_t horizon) {
  if (n_blocks < 1) throw std::invalid_argument("heis::block_coefficients: need n_blocks >= 1");
  BlockTable table;
  table.weight = b;
  std::uint64_t k = 1;
  for (int n = 1; n <= n_blocks; ++n) {
    const double target = std::exp2(n);
    BlockTable::Block blk;
    blk.first = k;
    KahanSum sum;
    while (sum.value() < target) {
      if (k > horizon) {
        throw std::runtime_error(
            "heis::block_coefficients: horizon " + std::to_string(horizon) +
            " too small: block " + std::to_string(n) + " reached sum " +
            std::to_string(sum.value()) + " of required " + std::to_string(target));
      }
      const double bk = b(k);
      if (!(bk > 0.0) || !std::isfinite(bk)) {
        throw std::domain_error("heis::block_coefficients: weights must be positive and finite");
      }
      sum.add(1.0 / bk);
      ++k;
    }
    blk.last = k - 1;
    blk.inv_sum = sum.value();
    blk.coeff = 1.0 / blk.inv_sum;
    table.blocks.push_back(blk);
  }
  return table;
}

}  // namespace heis
