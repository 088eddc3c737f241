#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "entrain/dsp/envelope.hpp"
#include "entrain/dsp/filterbank.hpp"
#include "entrain/dsp/goertzel.hpp"
#include "entrain/error.hpp"

namespace entrain::features {

inline constexpr std::size_t kEmsMetrics = 6;
inline constexpr std::array<std::string_view, kEmsMetrics> kEmsMetricNames{
    "peak_hz", "peak_ratio", "energy_3_6", "energy_0_4", "energy_4_10", "ratio_0_4_over_4_10"};
inline constexpr double kEnvelopeRateHz = 100.0;

/// Six summary metrics of a modulation power spectrum sampled at `freqs`.
inline std::array<double, kEmsMetrics> ems_metrics(std::span<const double> power,
                                                  std::span<const double> freqs) {
  if (power.size() != freqs.size() || power.empty()) {
    throw ValidationError("ems metrics: spectrum and grid lengths differ");
  }
  std::size_t peak = 0;
  double total = 0.0, e36 = 0.0, e04 = 0.0, e410 = 0.0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    total += power[k];
    if (power[k] > power[peak]) peak = k;
    if (freqs[k] >= 3.0 && freqs[k] <= 6.0) e36 += power[k];
    if (freqs[k] <= 4.0) {
      e04 += power[k];
    } else {
      e410 += power[k];
    }
  }
  std::array<double, kEmsMetrics> m{};
  m[0] = total > 0.0 ? freqs[peak] : 0.0;
  m[1] = total > 0.0 ? power[peak] / total : 0.0;
  m[2] = e36;
  m[3] = e04;
  m[4] = e410;
  m[5] = e410 > 0.0 ? e04 / e410 : 0.0;
  return m;
}

/// Block-averages a 16 kHz envelope down to 100 Hz. The trailing partial
/// block is dropped.
inline std::vector<double> decimate_envelope(std::span<const double> env, double sample_rate) {
  const auto block = static_cast<std::size_t>(std::lround(sample_rate / kEnvelopeRateHz));
  std::vector<double> out(env.size() / block);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < block; ++j) s += env[i * block + j];
    out[i] = s / static_cast<double>(block);
  }
  return out;
}

/// Modulation power spectrum of one band signal, normalized by the squared
/// envelope length so it does not grow with utterance duration.
inline std::vector<double> modulation_spectrum(std::span<const double> band_signal,
                                               double sample_rate = 16000.0) {
  const auto env = decimate_envelope(dsp::envelope(band_signal, sample_rate), sample_rate);
  if (env.size() < 2) throw ValidationError("ems: signal shorter than two envelope samples");
  const auto centered = dsp::remove_mean(env);
  const auto grid = dsp::modulation_grid();
  auto power = dsp::goertzel_power_spectrum(centered, grid, kEnvelopeRateHz);
  const double n2 = static_cast<double>(env.size()) * static_cast<double>(env.size());
  for (double& p : power) p /= n2;
  return power;
}

/// 60 values: full band first, then the nine octave bands, six metrics each.
inline std::vector<double> ems(std::span<const double> signal) {
  const auto grid = dsp::modulation_grid();
  std::vector<double> out;
  out.reserve(60);
  auto append = [&](std::span<const double> x) {
    const auto m = ems_metrics(modulation_spectrum(x), grid);
    out.insert(out.end(), m.begin(), m.end());
  };
  append(signal);
  for (const auto& band : dsp::filter_octave_bands(signal)) append(band);
  return out;
}

}  // namespace entrain::features
