#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "entrain/error.hpp"

// Descriptive statistics shared by every feature set. Conventions are uniform:
// population (divide-by-N) moments and non-excess kurtosis.
namespace entrain::stats {

inline void require_nonempty(std::span<const double> x) {
  if (x.empty()) throw ValidationError("statistic of an empty sequence");
}

inline double mean(std::span<const double> x) {
  require_nonempty(x);
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double central_moment(std::span<const double> x, double mu, int order) {
  double s = 0.0;
  for (double v : x) s += std::pow(v - mu, order);
  return s / static_cast<double>(x.size());
}

inline double variance(std::span<const double> x) {
  const double mu = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / static_cast<double>(x.size());
}

inline double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

inline double min(std::span<const double> x) {
  require_nonempty(x);
  return *std::min_element(x.begin(), x.end());
}

inline double max(std::span<const double> x) {
  require_nonempty(x);
  return *std::max_element(x.begin(), x.end());
}

inline double range(std::span<const double> x) { return max(x) - min(x); }

/// Linear-interpolation quantile (R type 7), q in [0, 1].
inline double quantile(std::span<const double> x, double q) {
  require_nonempty(x);
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

inline double median(std::span<const double> x) { return quantile(x, 0.5); }

inline double iqr(std::span<const double> x) {
  return quantile(x, 0.75) - quantile(x, 0.25);
}

/// Mean absolute deviation about the mean.
inline double mean_abs_deviation(std::span<const double> x) {
  const double mu = mean(x);
  double s = 0.0;
  for (double v : x) s += std::abs(v - mu);
  return s / static_cast<double>(x.size());
}

// Below this relative variance a sequence is treated as constant, and its
// standardized moments are reported as 0.
inline bool is_degenerate(std::span<const double> x, double var) {
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  return var <= 1e-18 * std::max(1.0, scale * scale);
}

inline double skewness(std::span<const double> x) {
  const double mu = mean(x);
  const double var = central_moment(x, mu, 2);
  if (is_degenerate(x, var)) return 0.0;
  return central_moment(x, mu, 3) / std::pow(var, 1.5);
}

/// Standardized fourth moment (a normal distribution gives 3).
inline double kurtosis(std::span<const double> x) {
  const double mu = mean(x);
  const double var = central_moment(x, mu, 2);
  if (is_degenerate(x, var)) return 0.0;
  return central_moment(x, mu, 4) / (var * var);
}

/// Least-squares slope of x against sample index times `step`.
inline double linear_slope(std::span<const double> x, double step = 1.0) {
  require_nonempty(x);
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const double tbar = 0.5 * static_cast<double>(n - 1) * step;
  const double ybar = mean(x);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * step - tbar;
    sxy += t * (x[i] - ybar);
    sxx += t * t;
  }
  return sxy / sxx;
}

/// Pearson correlation; nullopt when either input has zero variance.
inline std::optional<double> pearson(std::span<const double> a,
                                     std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("pearson: length mismatch");
  if (a.size() < 2) return std::nullopt;
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (is_degenerate(a, saa / a.size()) || is_degenerate(b, sbb / b.size())) {
    return std::nullopt;
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace entrain::stats
