#pragma once

// Riesz t-energies of uniform measures on rectangles and gauge balls,
// estimated by i.i.d. pair sampling:
//
//   I_t(lambda|_A) = lambda(A)^2 E[ d(X, Y)^-t ],  X, Y ~ Uniform(A).
//
// The energy integral is finite for t < 4 (the volume is 4-regular), but the
// kernel's second moment diverges for t >= 2, so point estimates at large t
// are heavy-tailed; the reported stderr is the usual sample-variance one and
// only meaningful in the light-tailed regime. Scale sweeps should average
// slopes over independent replicates, which cancels the common bias exactly
// because the estimator is dilation-equivariant in law.
//
// Closed-form upper bounds for I_t(R(0, r)), t in (0,4) \ {1,2,3}:
//
//   r1 <= r2:  r1^4 r2^(4-t)      t in (0, 2)
//              r1^(6-t) r2^2      t in (2, 4)
//   r1 >= r2:  r1^(4-t) r2^4      t in (0, 3)
//              r1^(t-2) r2^(2(5-t))  t in (3, 4)
//
// and the capacity lower bound Cap_t(R) >= lambda(R)^2 / I_t(R) through the
// uniform test measure.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "heis/core.hpp"
#include "heis/rng.hpp"
#include "heis/stats.hpp"

namespace heis {

struct EnergyEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n_pairs = 0;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t resampled = 0;  // coincident pairs redrawn (probability zero)
};

enum class EnergyCase {
  ThinLow,   // r1 <= r2, t in (0, 2)
  ThinHigh,  // r1 <= r2, t in (2, 4)
  FlatLow,   // r1 >= r2, t in (0, 3)
  FlatHigh,  // r1 >= r2, t in (3, 4)
};

struct EnergyBound {
  double t = 0.0;
  Radii r;
  double bound = 0.0;
  EnergyCase case_tag = EnergyCase::ThinLow;
};

namespace detail {

inline void check_energy_t(double t) {
  if (!(t > 0.0) || !(t < 4.0)) {
    throw std::domain_error("heis::energy: t must lie in (0, 4)");
  }
}

inline void check_bound_t(double t) {
  check_energy_t(t);
  if (t == 1.0 || t == 2.0 || t == 3.0) {
    throw std::domain_error(
        "heis::energy_bound_rect: t in {1, 2, 3} are logarithmic-correction "
        "breakpoints with no closed-form power bound");
  }
}

// Kernel mean over n i.i.d. point pairs drawn by `draw`, reduced with a
// fixed-shape pairwise tree so the result does not depend on how the pair
// index range would be partitioned across workers.
template <typename DrawPair>
inline EnergyEstimate kernel_mean(double t, std::uint64_t n_pairs, const Rng& base,
                                  DrawPair&& draw) {
  std::vector<double> kernel(n_pairs);
  std::uint64_t resampled = 0;
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    Rng rng = base.stream(i);
    double d;
    for (;;) {
      const Point x = draw(rng);
      const Point y = draw(rng);
      d = dist(x, y);
      if (d > 0.0) break;
      ++resampled;
    }
    kernel[i] = std::pow(d, -t);
  }
  const MeanVar mv = pairwise_mean_var(kernel);
  EnergyEstimate est;
  est.value = mv.mean;
  est.stderr_ = mv.stderr_of_mean();
  est.n_pairs = n_pairs;
  est.t = t;
  est.seed = base.seed();
  est.resampled = resampled;
  return est;
}

}  // namespace detail

inline EnergyEstimate riesz_energy_rect(const Radii& r, double t, std::uint64_t n_pairs,
                                        const Rng& rng) {
  detail::check_energy_t(t);
  if (n_pairs < 1000) {
    throw std::invalid_argument("heis::riesz_energy_rect: need n_pairs >= 1000");
  }
  EnergyEstimate est = detail::kernel_mean(
      t, n_pairs, rng, [&](Rng& g) { return sample_rect_local(r, g); });
  const double vol = rect_volume(r);
  est.value *= vol * vol;
  est.stderr_ *= vol * vol;
  return est;
}

// Ball energy with the ball volume estimated from the rejection acceptance
// rate of the same run (lambda(B) = rate * 2 pi rho^4); the reported stderr
// covers the kernel average only.
inline EnergyEstimate riesz_energy_ball(double rho, double t, std::uint64_t n_pairs,
                                        const Rng& rng) {
  detail::check_energy_t(t);
  if (!(rho > 0.0)) throw std::domain_error("heis::riesz_energy_ball: rho must be positive");
  if (n_pairs < 1000) {
    throw std::invalid_argument("heis::riesz_energy_ball: need n_pairs >= 1000");
  }
  BallSampleStats stats;
  const Point origin;
  EnergyEstimate est = detail::kernel_mean(
      t, n_pairs, rng, [&](Rng& g) { return sample_ball(origin, rho, g, &stats); });
  const double box_vol = 2.0 * kPi * rho * rho * rho * rho;
  const double lambda_hat = stats.acceptance_rate() * box_vol;
  est.value *= lambda_hat * lambda_hat;
  est.stderr_ *= lambda_hat * lambda_hat;
  return est;
}

inline EnergyBound energy_bound_rect(double t, const Radii& r) {
  detail::check_bound_t(t);
  EnergyBound out;
  out.t = t;
  out.r = r;
  if (r.r1 == r.r2) {
    // Every applicable case gives r^(8-t) on the diagonal; evaluate it once
    // so thin and flat classifications agree bit-for-bit.
    out.case_tag = t < 3.0 ? EnergyCase::FlatLow : EnergyCase::FlatHigh;
    out.bound = std::pow(r.r1, 8.0 - t);
    return out;
  }
  if (r.r1 < r.r2) {
    if (t < 2.0) {
      out.case_tag = EnergyCase::ThinLow;
      out.bound = std::pow(r.r1, 4.0) * std::pow(r.r2, 4.0 - t);
    } else {
      out.case_tag = EnergyCase::ThinHigh;
      out.bound = std::pow(r.r1, 6.0 - t) * (r.r2 * r.r2);
    }
  } else {
    if (t < 3.0) {
      out.case_tag = EnergyCase::FlatLow;
      out.bound = std::pow(r.r1, 4.0 - t) * std::pow(r.r2, 4.0);
    } else {
      out.case_tag = EnergyCase::FlatHigh;
      out.bound = std::pow(r.r1, t - 2.0) * std::pow(r.r2, 2.0 * (5.0 - t));
    }
  }
  return out;
}

// Cap_t(R(0,r)) >= lambda(R)^2 / I_t(R) with the uniform measure as test
// measure; statistical because the energy is a Monte Carlo estimate.
inline double capacity_lower_bound(const Radii& r, double /*t*/, const EnergyEstimate& e) {
  if (!(e.value > 0.0)) {
    throw std::invalid_argument("heis::capacity_lower_bound: energy estimate must be positive");
  }
  const double vol = rect_volume(r);
  return vol * vol / e.value;
}

// f_rho(x, y, z) = max(|x|, |y|, |z - 2 rho y|^(1/2)); comparable to the
// metric distance from (rho, 0, z0) after recentring.
inline double box_kernel(double rho, const Point& q) {
  if (!(rho >= 0.0)) throw std::domain_error("heis::box_kernel: rho must be >= 0");
  return std::max({std::abs(q.x), std::abs(q.y), std::sqrt(std::abs(q.z - 2.0 * rho * q.y))});
}

struct ComparabilityReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::uint64_t resampled = 0;
};

// Ratio extremes of d(p, q) / f_rho(q - p) over q uniform in the Euclidean
// box A' = (rho, 0, z0) + [-2, 2]^2 x [-2, 2] (the r = (1, 1) probe box).
// Exact bracket: f <= d <= 5^(1/4) f, so both extremes lie in [1/2, 2].
inline ComparabilityReport kernel_comparability(double rho, double z0,
                                                std::uint64_t n_samples, const Rng& base) {
  if (!(rho >= 0.0)) throw std::domain_error("heis::kernel_comparability: rho must be >= 0");
  if (n_samples < 1000) {
    throw std::invalid_argument("heis::kernel_comparability: need n_samples >= 1000");
  }
  const Point p(rho, 0.0, z0);
  ComparabilityReport report;
  report.min_ratio = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    Rng rng = base.stream(i);
    for (;;) {
      const Point q(rho + rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                    z0 + rng.uniform(-2.0, 2.0));
      const double f = box_kernel(rho, Point(q.x - rho, q.y, q.z - z0));
      if (f == 0.0) {
        ++report.resampled;
        continue;
      }
      const double ratio = dist(p, q) / f;
      report.min_ratio = std::min(report.min_ratio, ratio);
      report.max_ratio = std::max(report.max_ratio, ratio);
      break;
    }
  }
  return report;
}

}  // namespace heis
