#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "entrain/dsp/butterworth.hpp"
#include "entrain/error.hpp"

namespace entrain::dsp {

inline constexpr int kOctaveBands = 9;
inline constexpr std::array<double, kOctaveBands> kOctaveCenters{
    30.0, 60.0, 120.0, 240.0, 480.0, 960.0, 1920.0, 3840.0, 7680.0};
inline constexpr std::size_t kMinFilterBankSamples = 64;

struct OctaveBand {
  double center_hz;
  double lo_hz;
  double hi_hz;
  SosFilter filter;
};

/// Nine octave bands, each an 8-pole Butterworth band-pass spanning
/// [c/sqrt2, c*sqrt2]. An upper edge at or beyond nyquist is clipped to
/// nyquist - 1 Hz (band 9 at 16 kHz becomes 5431..7999 Hz).
class OctaveFilterBank {
 public:
  explicit OctaveFilterBank(double sample_rate = 16000.0) : sample_rate_(sample_rate) {
    const double nyquist = 0.5 * sample_rate;
    for (double c : kOctaveCenters) {
      const double lo = c / std::sqrt(2.0);
      const double hi = std::min(c * std::sqrt(2.0), nyquist - 1.0);
      bands_.push_back({c, lo, hi, butterworth_bandpass(4, lo, hi, sample_rate)});
    }
  }

  double sample_rate() const { return sample_rate_; }
  const std::vector<OctaveBand>& bands() const { return bands_; }

  std::vector<std::vector<double>> apply(std::span<const double> signal) const {
    if (signal.size() < kMinFilterBankSamples) {
      throw ValidationError("octave filter bank needs at least 64 samples");
    }
    std::vector<std::vector<double>> out;
    out.reserve(bands_.size());
    for (const auto& b : bands_) out.push_back(b.filter.apply(signal));
    return out;
  }

 private:
  double sample_rate_;
  std::vector<OctaveBand> bands_;
};

/// Shared 16 kHz bank; construction is deterministic so one instance serves
/// every thread.
inline const OctaveFilterBank& default_filter_bank() {
  static const OctaveFilterBank bank(16000.0);
  return bank;
}

inline std::vector<std::vector<double>> filter_octave_bands(std::span<const double> signal) {
  return default_filter_bank().apply(signal);
}

}  // namespace entrain::dsp
