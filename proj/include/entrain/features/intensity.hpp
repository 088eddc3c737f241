#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "entrain/error.hpp"

namespace entrain::features {

inline constexpr double kIntensityFloor = 1e-9;

/// Per-frame 10*log10(mean square), 20 ms frames every 10 ms. A signal
/// shorter than one frame is treated as a single frame.
inline std::vector<double> intensity_contour(std::span<const double> x, double sample_rate = 16000.0) {
  if (x.empty()) throw ValidationError("intensity of an empty signal");
  const auto len = static_cast<std::size_t>(std::lround(0.020 * sample_rate));
  const auto hop = static_cast<std::size_t>(std::lround(0.010 * sample_rate));
  auto db = [](std::span<const double> frame) {
    double s = 0.0;
    for (double v : frame) s += v * v;
    return 10.0 * std::log10(std::max(s / static_cast<double>(frame.size()), kIntensityFloor));
  };
  std::vector<double> out;
  if (x.size() < len) {
    out.push_back(db(x));
    return out;
  }
  for (std::size_t start = 0; start + len <= x.size(); start += hop) out.push_back(db(x.subspan(start, len)));
  return out;
}

inline double mean_intensity(std::span<const double> x, double sample_rate = 16000.0) {
  const auto c = intensity_contour(x, sample_rate);
  double s = 0.0;
  for (double v : c) s += v;
  return s / static_cast<double>(c.size());
}

}  // namespace entrain::features
