#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <vector>

#include "entrain/corpus/audio.hpp"
#include "entrain/error.hpp"

namespace entrain::corpus {

inline constexpr double kDefaultReferenceRms = 0.1;

struct LoudnessResult {
  AudioTrack track;
  double gain = 1.0;
  bool peak_limited = false;  // true when the reference RMS would have clipped
};

inline double rms(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

inline double peak(const std::vector<double>& x) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::abs(v));
  return p;
}

/// Scales the track to `reference_rms`, or to a peak of exactly 1.0 when the
/// reference gain would push any sample beyond full scale.
inline LoudnessResult normalize_loudness(const AudioTrack& track,
                                         double reference_rms = kDefaultReferenceRms) {
  if (!(reference_rms > 0.0)) throw ValidationError("reference RMS must be positive");
  const double level = rms(track.samples);
  if (!(level > 0.0)) throw ValidationError("silent track");
  const double pk = peak(track.samples);
  LoudnessResult out;
  out.track = track;
  out.gain = reference_rms / level;
  if (pk * out.gain > 1.0) {
    out.gain = 1.0 / pk;
    out.peak_limited = true;
  }
  for (double& v : out.track.samples) {
    v = std::abs(v) == pk && out.peak_limited ? std::copysign(1.0, v) : v * out.gain;
  }
  return out;
}

struct ResamplerOptions {
  double passband_hz = 7600.0;
  double stopband_hz = 8000.0;
  double attenuation_db = 80.0;
  double half_width_s = 0.008;
};

/// Kaiser-windowed sinc decimator to 16 kHz. The kernel is tabulated per
/// output phase when the rate ratio has a small denominator.
class Resampler {
 public:
  Resampler(int input_rate, ResamplerOptions opts = {}) : in_rate_(input_rate), opts_(opts) {
    if (input_rate < kTargetSampleRate) throw ValidationError("upsampling unsupported");
    const double a = opts_.attenuation_db;
    beta_ = a > 50.0 ? 0.1102 * (a - 8.7) : 0.5842 * std::pow(a - 21.0, 0.4) + 0.07886 * (a - 21.0);
    cutoff_ = 0.5 * (opts_.passband_hz + opts_.stopband_hz);
    const int g = std::gcd(input_rate, kTargetSampleRate);
    step_num_ = input_rate / g;  // input samples advanced per output sample = num/den
    step_den_ = kTargetSampleRate / g;
    reach_ = static_cast<long>(std::ceil(opts_.half_width_s * in_rate_));
    if (step_den_ <= 4096) {
      table_.resize(static_cast<std::size_t>(step_den_));
      for (long ph = 0; ph < step_den_; ++ph) {
        const double frac = static_cast<double>(ph) / static_cast<double>(step_den_);
        auto& taps = table_[static_cast<std::size_t>(ph)];
        taps.resize(static_cast<std::size_t>(2 * reach_ + 1));
        for (long k = -reach_; k <= reach_; ++k) taps[static_cast<std::size_t>(k + reach_)] = kernel(frac - k);
      }
    }
  }

  std::vector<double> operator()(const std::vector<double>& x) const {
    if (in_rate_ == kTargetSampleRate) return x;
    const auto n_out = static_cast<std::size_t>(
        std::llround(static_cast<double>(x.size()) * kTargetSampleRate / in_rate_));
    std::vector<double> y(n_out);
    const auto n_in = static_cast<long>(x.size());
    for (std::size_t n = 0; n < n_out; ++n) {
      const long long num = static_cast<long long>(n) * step_num_;
      const long base = static_cast<long>(num / step_den_);
      const long ph = static_cast<long>(num % step_den_);
      const double frac = static_cast<double>(ph) / static_cast<double>(step_den_);
      double acc = 0.0;
      for (long k = -reach_; k <= reach_; ++k) {
        const long idx = base + k;
        if (idx < 0 || idx >= n_in) continue;
        const double h = table_.empty() ? kernel(frac - k)
                                        : table_[static_cast<std::size_t>(ph)][static_cast<std::size_t>(k + reach_)];
        acc += x[static_cast<std::size_t>(idx)] * h;
      }
      y[n] = acc;
    }
    return y;
  }

 private:
  // Impulse response at an offset of `d` input samples.
  double kernel(double d) const {
    const double t = d / in_rate_;
    if (std::abs(t) > opts_.half_width_s) return 0.0;
    const double u = 2.0 * cutoff_ * t;
    const double sinc = u == 0.0 ? 1.0 : std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
    const double r = t / opts_.half_width_s;
    const double w = std::cyl_bessel_i(0.0, beta_ * std::sqrt(std::max(0.0, 1.0 - r * r))) /
                     std::cyl_bessel_i(0.0, beta_);
    return 2.0 * cutoff_ / in_rate_ * sinc * w;
  }

  int in_rate_;
  ResamplerOptions opts_;
  double beta_ = 0.0;
  double cutoff_ = 0.0;
  long step_num_ = 1;
  long step_den_ = 1;
  long reach_ = 0;
  std::vector<std::vector<double>> table_;
};

inline std::shared_ptr<const Resampler> cached_resampler(int input_rate) {
  static std::mutex m;
  static std::map<int, std::shared_ptr<const Resampler>> cache;
  std::lock_guard lock(m);
  auto& slot = cache[input_rate];
  if (!slot) slot = std::make_shared<const Resampler>(input_rate);
  return slot;
}

inline AudioTrack resample_to_16k(const AudioTrack& track) {
  if (track.sample_rate < kTargetSampleRate) throw ValidationError("upsampling unsupported");
  if (track.sample_rate == kTargetSampleRate) return track;
  AudioTrack out;
  out.speaker_id = track.speaker_id;
  out.sample_rate = kTargetSampleRate;
  out.samples = (*cached_resampler(track.sample_rate))(track.samples);
  return out;
}

}  // namespace entrain::corpus
