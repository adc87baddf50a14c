#pragma once

// Small numeric utilities shared by the estimators: compensated summation,
// deterministic pairwise mean/variance reduction, and ordinary least squares
// on (x, y) data for the log-log slope fits.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace heis {

// Neumaier variant of Kahan summation.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct MeanVar {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;  // sum of squared deviations from the mean

  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stderr_of_mean() const {
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }

  static MeanVar merge(const MeanVar& a, const MeanVar& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    MeanVar out;
    out.n = a.n + b.n;
    const double na = static_cast<double>(a.n);
    const double nb = static_cast<double>(b.n);
    const double d = b.mean - a.mean;
    out.mean = a.mean + d * nb / (na + nb);
    out.m2 = a.m2 + b.m2 + d * d * na * nb / (na + nb);
    return out;
  }
};

namespace detail {

inline MeanVar mean_var_leaf(std::span<const double> xs) {
  MeanVar mv;
  for (double x : xs) {
    ++mv.n;
    const double d = x - mv.mean;
    mv.mean += d / static_cast<double>(mv.n);
    mv.m2 += d * (x - mv.mean);
  }
  return mv;
}

}  // namespace detail

// Mean/variance via a fixed-shape binary reduction tree over the index range.
// The tree shape depends only on the length, so a parallel evaluation of the
// halves reduces to the same result as the sequential one.
inline MeanVar pairwise_mean_var(std::span<const double> xs) {
  constexpr std::size_t kLeaf = 64;
  if (xs.size() <= kLeaf) return detail::mean_var_leaf(xs);
  const std::size_t mid = xs.size() / 2;
  return MeanVar::merge(pairwise_mean_var(xs.first(mid)), pairwise_mean_var(xs.subspan(mid)));
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;        // coefficient of determination
  double max_abs_residual = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  KahanSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n;
  const double my = sy.value() / n;
  KahanSum sxx, sxy, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
    syy.add((y[i] - my) * (y[i] - my));
  }
  if (sxx.value() <= 0.0) throw std::invalid_argument("fit_line: x values are degenerate");
  LineFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
    fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(r));
  }
  fit.r2 = syy.value() > 0.0 ? 1.0 - ss_res / syy.value() : 1.0;
  return fit;
}

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  return fit_line(std::span<const double>(x), std::span<const double>(y));
}

}  // namespace heis
