#pragma once

// Directed singular value function of a rectangle, for t in [0, 4]:
//
//   r1 <= r2:  Phi^t(r) = r2^t            (t in [0, 2])
//              Phi^t(r) = r1^(t-2) r2^2   (t in [2, 4])
//   r1 >= r2:  Phi^t(r) = r1^t            (t in [0, 3])
//              Phi^t(r) = r1^(6-t) r2^(2(t-3))  (t in [3, 4])
//
// Both families agree at r1 = r2 (value r^t) and each is continuous in t at
// its breakpoint. For power-law radii r_n = (n^-alpha, n^-beta) the series
// sum_n Phi^t(r_n) has terms n^-e(t) with e piecewise linear and strictly
// increasing, so the dimension threshold inf{t : e(t) > 1} ^ 4 is found by
// bisection and snapped to the exact breakpoint of the active linear piece.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "heis/core.hpp"
#include "heis/stats.hpp"

namespace heis {

enum class PhiBranch {
  ThinLow,   // r1 <= r2, t in [0, 2]
  ThinHigh,  // r1 <= r2, t in (2, 4]
  FlatLow,   // r1 >= r2, t in [0, 3]
  FlatHigh,  // r1 >= r2, t in (3, 4]
};

inline const char* to_string(PhiBranch b) {
  switch (b) {
    case PhiBranch::ThinLow: return "ThinLow";
    case PhiBranch::ThinHigh: return "ThinHigh";
    case PhiBranch::FlatLow: return "FlatLow";
    case PhiBranch::FlatHigh: return "FlatHigh";
  }
  return "?";
}

struct PhiValue {
  double t = 0.0;
  Radii r;
  double value = 0.0;
  PhiBranch branch = PhiBranch::ThinLow;
};

namespace detail {

inline void check_t_range(double t) {
  if (!(t >= 0.0) || !(t <= 4.0)) {
    throw std::domain_error("heis::phi: t must lie in [0, 4]");
  }
}

}  // namespace detail

inline PhiValue phi(double t, const Radii& r) {
  detail::check_t_range(t);
  PhiValue out;
  out.t = t;
  out.r = r;
  if (r.r1 == r.r2) {
    // Both case families collapse to r^t on the diagonal.
    out.branch = t <= 2.0 ? PhiBranch::ThinLow
                          : (t <= 3.0 ? PhiBranch::ThinHigh : PhiBranch::FlatHigh);
    out.value = std::pow(r.r1, t);
    return out;
  }
  if (r.r1 < r.r2) {
    if (t <= 2.0) {
      out.branch = PhiBranch::ThinLow;
      out.value = std::pow(r.r2, t);
    } else {
      out.branch = PhiBranch::ThinHigh;
      out.value = std::pow(r.r1, t - 2.0) * (r.r2 * r.r2);
    }
  } else {
    if (t <= 3.0) {
      out.branch = PhiBranch::FlatLow;
      out.value = std::pow(r.r1, t);
    } else {
      out.branch = PhiBranch::FlatHigh;
      out.value = std::pow(r.r1, 6.0 - t) * std::pow(r.r2, 2.0 * (t - 3.0));
    }
  }
  return out;
}

// Radii sequence r_n = (n^-alpha, n^-beta), alpha, beta > 0.
struct PowerLawSeq {
  double alpha = 0.5;
  double beta = 0.5;

  PowerLawSeq() = default;
  PowerLawSeq(double a, double b) : alpha(a), beta(b) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
      throw std::domain_error("heis::PowerLawSeq: alpha and beta must be finite and positive");
    }
  }

  Radii radii_at(double n) const { return Radii(std::pow(n, -alpha), std::pow(n, -beta)); }
};

// Exponent e(t) with Phi^t(r_n) = n^-e(t). The branch is classified by the
// asymptotic order of the radii (alpha vs beta): convergence of the series
// depends only on tails. alpha >= beta means r1 <= r2 eventually (thin).
inline double phi_exponent(double t, const PowerLawSeq& s) {
  detail::check_t_range(t);
  if (s.alpha >= s.beta) {
    return t <= 2.0 ? s.beta * t : s.alpha * (t - 2.0) + 2.0 * s.beta;
  }
  return t <= 3.0 ? s.alpha * t : s.alpha * (6.0 - t) + 2.0 * s.beta * (t - 3.0);
}

struct Rational {
  long long num = 0;
  long long den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct DimensionThreshold {
  double value = 0.0;                 // min(4, inf{t : e(t) > 1})
  std::optional<Rational> exact;      // present when alpha, beta are exact small rationals
};

namespace detail {

// Exact solve of e(t) = 1 on the piecewise-linear exponent, in doubles.
// Returns 4 when the series diverges for every t <= 4.
inline double threshold_breakpoint(const PowerLawSeq& s) {
  if (phi_exponent(4.0, s) <= 1.0) return 4.0;
  if (s.alpha >= s.beta) {
    if (s.beta * 2.0 >= 1.0) return 1.0 / s.beta;
    return 2.0 + (1.0 - 2.0 * s.beta) / s.alpha;
  }
  if (s.alpha * 3.0 >= 1.0) return 1.0 / s.alpha;
  return (1.0 - 6.0 * s.alpha + 6.0 * s.beta) / (2.0 * s.beta - s.alpha);
}

// Smallest-denominator rational that rounds to exactly x, via continued
// fractions. Fails for doubles that are not small exact rationals.
inline std::optional<Rational> to_exact_rational(double x, long long max_den = 1000000000LL) {
  if (!(x > 0.0) || !std::isfinite(x)) return std::nullopt;
  double a = x;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    const double fl = std::floor(a);
    if (fl > 9.0e18) return std::nullopt;
    const long long ai = static_cast<long long>(fl);
    const long long p2 = ai * p1 + p0;
    const long long q2 = ai * q1 + q0;
    if (q2 > max_den || p2 < 0 || q2 <= 0) return std::nullopt;
    if (static_cast<double>(p2) / static_cast<double>(q2) == x) {
      return Rational{p2, q2};
    }
    const double frac = a - fl;
    if (frac <= 0.0) return std::nullopt;
    a = 1.0 / frac;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
  }
  return std::nullopt;
}

inline std::optional<Rational> reduce128(__int128 num, __int128 den) {
  if (den == 0) return std::nullopt;
  if (den < 0) { num = -num; den = -den; }
  __int128 a = num < 0 ? -num : num, b = den;
  while (b != 0) { __int128 t = a % b; a = b; b = t; }
  if (a != 0) { num /= a; den /= a; }
  constexpr __int128 lim = 0x7fffffffffffffffLL;
  if (num > lim || num < -lim || den > lim) return std::nullopt;
  return Rational{static_cast<long long>(num), static_cast<long long>(den)};
}

// Mirrors threshold_breakpoint in exact rational arithmetic.
inline std::optional<Rational> threshold_rational(const PowerLawSeq& s) {
  const auto ar = to_exact_rational(s.alpha);
  const auto br = to_exact_rational(s.beta);
  if (!ar || !br) return std::nullopt;
  const __int128 an = ar->num, ad = ar->den, bn = br->num, bd = br->den;
  // e(4) = 2(alpha + beta) <= 1  <=>  2(an bd + bn ad) <= ad bd
  if (2 * (an * bd + bn * ad) <= ad * bd) return Rational{4, 1};
  if (an * bd >= bn * ad) {  // alpha >= beta
    if (2 * bn >= bd) return reduce128(bd, bn);  // 1/beta
    // 2 + (1 - 2 beta)/alpha = (2 an bd + bd - 2 bn ad) / (an bd)
    return reduce128(2 * an * bd + ad * bd - 2 * bn * ad, an * bd);
  }
  if (3 * an >= ad) return reduce128(ad, an);  // 1/alpha
  // (1 - 6 alpha + 6 beta) / (2 beta - alpha)
  return reduce128(ad * bd - 6 * an * bd + 6 * bn * ad, 2 * bn * ad - an * bd);
}

}  // namespace detail

// Threshold by bisection on the monotone e(t) to absolute tolerance 1e-9,
// snapped to the exact breakpoint when within 1e-9 of it.
inline DimensionThreshold dimension_threshold(const PowerLawSeq& s) {
  DimensionThreshold out;
  if (phi_exponent(4.0, s) <= 1.0) {
    out.value = 4.0;
    out.exact = Rational{4, 1};
    return out;
  }
  double lo = 0.0, hi = 4.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (phi_exponent(mid, s) > 1.0 ? hi : lo) = mid;
  }
  double t = 0.5 * (lo + hi);
  const double exact = detail::threshold_breakpoint(s);
  if (std::abs(t - exact) <= 1e-9) t = exact;
  out.value = t;
  if (auto rational = detail::threshold_rational(s)) {
    if (std::abs(rational->value() - t) <= 1e-9) out.exact = rational;
  }
  return out;
}

// sum_{n=1}^{N} Phi^t(r_n), compensated. Terms are <= 1 for n >= 1 because
// alpha, beta > 0 keep the radii at most 1.
inline double series_partial_sum(double t, const PowerLawSeq& s, std::uint64_t n_terms) {
  detail::check_t_range(t);
  if (n_terms < 1) throw std::invalid_argument("heis::series_partial_sum: N must be >= 1");
  KahanSum sum;
  for (std::uint64_t n = 1; n <= n_terms; ++n) {
    sum.add(phi(t, s.radii_at(static_cast<double>(n))).value);
  }
  return sum.value();
}

}  // namespace heis
