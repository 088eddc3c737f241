#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "entrain/error.hpp"

namespace entrain::dsp {

inline constexpr int kModulationGridPoints = 41;
inline constexpr double kModulationMaxHz = 10.0;

/// Uniform grid over (0, 10] Hz with step 10/41 (about 0.244 Hz).
inline std::vector<double> modulation_grid() {
  std::vector<double> f(kModulationGridPoints);
  for (int k = 0; k < kModulationGridPoints; ++k) {
    f[k] = kModulationMaxHz * (k + 1) / kModulationGridPoints;
  }
  return f;
}

inline double modulation_grid_step() { return kModulationMaxHz / kModulationGridPoints; }

inline std::vector<double> remove_mean(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  if (out.empty()) return out;
  double m = 0.0;
  for (double v : out) m += v;
  m /= static_cast<double>(out.size());
  for (double& v : out) v -= m;
  return out;
}

/// |sum_n x[n] exp(-j w n)|^2 at w = 2 pi f / fs, by the second-order
/// Goertzel recursion. Valid for any (not only bin-centered) frequency.
inline double goertzel_power(std::span<const double> x, double freq_hz, double sample_rate) {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
  const double coeff = 2.0 * std::cos(w);
  double s1 = 0.0;
  double s2 = 0.0;
  for (double v : x) {
    const double s0 = v + coeff * s1 - s2;
    s2 = s1;
    s1 = s0;
  }
  const double re = s1 - std::cos(w) * s2;
  const double im = std::sin(w) * s2;
  return re * re + im * im;
}

/// Power spectrum of a mean-removed envelope at the requested frequencies.
inline std::vector<double> goertzel_power_spectrum(std::span<const double> envelope,
                                                   std::span<const double> freqs_hz,
                                                   double sample_rate) {
  if (!(sample_rate > 0.0)) throw ValidationError("sample rate must be positive");
  double sum = 0.0;
  double sq = 0.0;
  for (double v : envelope) {
    sum += v;
    sq += v * v;
  }
  if (!envelope.empty()) {
    const double n = static_cast<double>(envelope.size());
    if (std::abs(sum / n) > 1e-9 * std::sqrt(sq / n)) {
      throw ValidationError("goertzel input must be mean-removed");
    }
  }
  std::vector<double> out;
  out.reserve(freqs_hz.size());
  for (double f : freqs_hz) {
    if (!(f > 0.0) || f > 0.5 * sample_rate) {
      throw ValidationError("goertzel frequency outside (0, nyquist]");
    }
    out.push_back(goertzel_power(envelope, f, sample_rate));
  }
  return out;
}

}  // namespace entrain::dsp
