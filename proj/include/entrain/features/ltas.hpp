#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "entrain/dsp/filterbank.hpp"
#include "entrain/error.hpp"
#include "entrain/stats.hpp"

namespace entrain::features {

inline constexpr double kLtasFrameSeconds = 0.020;
inline constexpr std::array<std::string_view, 10> kLtasBandStats{
    "mean", "std", "min", "max", "range", "median", "iqr", "skew", "kurt", "slope"};
inline constexpr std::array<std::string_view, 9> kLtasFullStats{
    "mean", "std", "min", "max", "median", "iqr", "skew", "kurt", "slope"};

/// RMS of consecutive non-overlapping rectangular frames; a trailing partial
/// frame is dropped.
inline std::vector<double> rms_contour(std::span<const double> x, double sample_rate = 16000.0) {
  const auto len = static_cast<std::size_t>(std::lround(kLtasFrameSeconds * sample_rate));
  std::vector<double> out(x.size() / len);
  for (std::size_t f = 0; f < out.size(); ++f) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += x[f * len + i] * x[f * len + i];
    out[f] = std::sqrt(s / static_cast<double>(len));
  }
  return out;
}

inline double contour_stat(std::string_view name, std::span<const double> c) {
  if (name == "mean") return stats::mean(c);
  if (name == "std") return stats::stddev(c);
  if (name == "min") return stats::min(c);
  if (name == "max") return stats::max(c);
  if (name == "range") return stats::range(c);
  if (name == "median") return stats::median(c);
  if (name == "iqr") return stats::iqr(c);
  if (name == "skew") return stats::skewness(c);
  if (name == "kurt") return stats::kurtosis(c);
  if (name == "slope") return stats::linear_slope(c, kLtasFrameSeconds);
  throw ValidationError("unknown contour statistic");
}

/// 99 values: nine full-band contour statistics, then ten per octave band.
inline std::vector<double> ltas(std::span<const double> signal) {
  const auto full = rms_contour(signal);
  if (full.size() < 2) throw ValidationError("ltas: signal shorter than two frames");
  std::vector<double> out;
  out.reserve(99);
  for (auto s : kLtasFullStats) out.push_back(contour_stat(s, full));
  for (const auto& band : dsp::filter_octave_bands(signal)) {
    const auto c = rms_contour(band);
    for (auto s : kLtasBandStats) out.push_back(contour_stat(s, c));
  }
  return out;
}

}  // namespace entrain::features
