#pragma once

#include <complex>
#include <span>
#include <vector>

#include "entrain/dsp/butterworth.hpp"
#include "entrain/dsp/fft.hpp"
#include "entrain/error.hpp"

namespace entrain::dsp {

/// Magnitude of the analytic signal x + jH{x}. The transform runs over the
/// whole input, zero-padded to a power of two and truncated back.
inline std::vector<double> analytic_magnitude(std::span<const double> x) {
  if (x.empty()) throw ValidationError("analytic signal of an empty sequence");
  const std::size_t n = next_pow2(x.size());
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = x[i];
  ComplexFft(n, false).execute(buf);
  // keep DC and nyquist, double positive frequencies, zero negative ones
  for (std::size_t k = 1; k < n; ++k) {
    if (2 * k < n) {
      buf[k] *= 2.0;
    } else if (2 * k > n) {
      buf[k] = 0.0;
    }
  }
  ComplexFft(n, true).execute(buf);
  std::vector<double> mag(x.size());
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < x.size(); ++i) mag[i] = std::abs(buf[i]) * inv;
  return mag;
}

inline constexpr double kEnvelopeCutoffHz = 30.0;
inline constexpr int kEnvelopeLowpassOrder = 4;

class EnvelopeExtractor {
 public:
  explicit EnvelopeExtractor(double sample_rate = 16000.0)
      : sample_rate_(sample_rate),
        lpf_(butterworth_lowpass(kEnvelopeLowpassOrder, kEnvelopeCutoffHz, sample_rate)) {}

  const SosFilter& lowpass() const { return lpf_; }
  double sample_rate() const { return sample_rate_; }

  /// Low-passed analytic magnitude, same rate and length as the input.
  std::vector<double> operator()(std::span<const double> band_signal) const {
    return lpf_.apply(analytic_magnitude(band_signal));
  }

 private:
  double sample_rate_;
  SosFilter lpf_;
};

inline std::vector<double> envelope(std::span<const double> band_signal,
                                    double sample_rate = 16000.0) {
  if (sample_rate == 16000.0) {
    static const EnvelopeExtractor extractor(16000.0);
    return extractor(band_signal);
  }
  return EnvelopeExtractor(sample_rate)(band_signal);
}

}  // namespace entrain::dsp
