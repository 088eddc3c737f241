#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "entrain/dsp/fft.hpp"

namespace entrain::dsp {

struct PitchOptions {
  double sample_rate = 16000.0;
  double time_step_s = 0.005;
  double floor_hz = 75.0;
  double ceiling_hz = 600.0;
  double silence_threshold = 0.03;  // fraction of the global absolute peak
  double voicing_threshold = 0.45;  // on the normalized autocorrelation peak
  double octave_cost = 0.01;        // per octave, favours higher candidates
  double periods_per_window = 3.0;
  double shortest_period_s = 1e-4;
  double longest_period_s = 0.02;
  double max_period_factor = 1.3;
};

struct GlottalPulse {
  double time_s = 0.0;
  double amplitude = 0.0;
};

/// Frame-level pitch contour plus the cycle-level pulse trains recovered
/// from each voiced stretch.
struct PitchTrack {
  std::vector<double> times_s;
  std::vector<double> f0_hz;  // 0 when unvoiced
  std::vector<bool> voicing;
  std::vector<double> peak_autocorr;  // in [0, 1]
  std::vector<std::vector<GlottalPulse>> pulse_trains;
  std::vector<double> periods_s;

  std::size_t voiced_count() const {
    return static_cast<std::size_t>(std::count(voicing.begin(), voicing.end(), true));
  }
};

namespace detail {

struct ParabolicPeak {
  double offset;
  double value;
};

inline ParabolicPeak parabolic_peak(double left, double mid, double right) {
  const double denom = left - 2.0 * mid + right;
  if (denom >= 0.0) return {0.0, mid};
  const double off = std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
  return {off, mid - 0.25 * (left - right) * off};
}

// Largest sign-adjusted sample in [lo, hi], refined by parabolic
// interpolation. Returns false when the range is empty.
inline bool find_peak(std::span<const double> x, double sign, long lo, long hi,
                      double sample_rate, GlottalPulse& out) {
  lo = std::max(lo, 1L);
  hi = std::min(hi, static_cast<long>(x.size()) - 2);
  if (lo > hi) return false;
  long best = lo;
  for (long i = lo + 1; i <= hi; ++i) {
    if (sign * x[i] > sign * x[best]) best = i;
  }
  const auto p = parabolic_peak(sign * x[best - 1], sign * x[best], sign * x[best + 1]);
  out.time_s = (static_cast<double>(best) + p.offset) / sample_rate;
  out.amplitude = p.value;
  return true;
}

}  // namespace detail

/// Autocorrelation pitch tracker in the style of Boersma's method: Hann
/// window of three floor periods, window-corrected normalized autocorrelation,
/// octave-cost weighted candidate choice per frame (no path search).
class PitchTracker {
 public:
  explicit PitchTracker(PitchOptions opts = {}) : opts_(opts) {
    window_len_ = static_cast<std::size_t>(
        std::lround(opts_.periods_per_window / opts_.floor_hz * opts_.sample_rate));
    fft_len_ = next_pow2(2 * window_len_);
    window_.resize(window_len_);
    for (std::size_t i = 0; i < window_len_; ++i) {
      window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) /
                                        static_cast<double>(window_len_));
    }
    const ComplexFft fwd(fft_len_, false);
    const ComplexFft inv(fft_len_, true);
    window_ac_ = autocorrelation(window_, fwd, inv);
  }

  const PitchOptions& options() const { return opts_; }
  std::size_t window_length() const { return window_len_; }

  PitchTrack operator()(std::span<const double> x) const {
    PitchTrack track;
    const auto step = static_cast<std::size_t>(std::lround(opts_.time_step_s * opts_.sample_rate));
    if (x.size() < window_len_) return track;
    const std::size_t frames = 1 + (x.size() - window_len_) / step;

    double global_peak = 0.0;
    for (double v : x) global_peak = std::max(global_peak, std::abs(v));

    const auto min_lag = static_cast<std::size_t>(std::ceil(opts_.sample_rate / opts_.ceiling_hz));
    const auto max_lag = std::min(static_cast<std::size_t>(std::floor(opts_.sample_rate / opts_.floor_hz)),
                                  window_len_ - 2);
    const ComplexFft fwd(fft_len_, false);
    const ComplexFft inv(fft_len_, true);
    std::vector<double> seg(window_len_);
    for (std::size_t f = 0; f < frames; ++f) {
      const std::size_t start = f * step;
      track.times_s.push_back((static_cast<double>(start) + 0.5 * static_cast<double>(window_len_)) /
                              opts_.sample_rate);
      double mean = 0.0;
      for (std::size_t i = 0; i < window_len_; ++i) mean += x[start + i];
      mean /= static_cast<double>(window_len_);
      double local_peak = 0.0;
      for (std::size_t i = 0; i < window_len_; ++i) {
        const double v = x[start + i] - mean;
        local_peak = std::max(local_peak, std::abs(v));
        seg[i] = v * window_[i];
      }
      double best_r = 0.0;
      double best_f0 = 0.0;
      if (global_peak > 0.0 && local_peak > 0.0) {
        const auto r = autocorrelation(seg, fwd, inv);
        if (r[0] > 0.0) {
          std::vector<double> rn(max_lag + 2);
          for (std::size_t k = 0; k < rn.size(); ++k) {
            rn[k] = (r[k] / r[0]) / (window_ac_[k] / window_ac_[0]);
          }
          double best_strength = -1e300;
          for (std::size_t k = std::max<std::size_t>(min_lag, 2); k <= max_lag; ++k) {
            if (!(rn[k] > rn[k - 1] && rn[k] >= rn[k + 1])) continue;
            const auto p = detail::parabolic_peak(rn[k - 1], rn[k], rn[k + 1]);
            const double lag = static_cast<double>(k) + p.offset;
            const double f0 = opts_.sample_rate / lag;
            if (f0 < opts_.floor_hz || f0 > opts_.ceiling_hz) continue;
            const double strength = p.value + opts_.octave_cost * std::log2(f0 / opts_.floor_hz);
            if (strength > best_strength) {
              best_strength = strength;
              best_r = p.value;
              best_f0 = f0;
            }
          }
        }
      }
      const bool loud = local_peak >= opts_.silence_threshold * global_peak && global_peak > 0.0;
      const bool voiced = loud && best_f0 > 0.0 && best_r >= opts_.voicing_threshold;
      track.voicing.push_back(voiced);
      track.f0_hz.push_back(voiced ? best_f0 : 0.0);
      track.peak_autocorr.push_back(std::clamp(best_r, 0.0, 1.0));
    }
    extract_pulses(x, track);
    return track;
  }

 private:
  std::vector<double> autocorrelation(std::span<const double> seg, const ComplexFft& fwd,
                                      const ComplexFft& inv) const {
    std::vector<std::complex<double>> buf(fft_len_);
    for (std::size_t i = 0; i < seg.size(); ++i) buf[i] = seg[i];
    fwd.execute(buf);
    for (auto& v : buf) v = std::norm(v);
    inv.execute(buf);
    std::vector<double> r(seg.size());
    for (std::size_t k = 0; k < seg.size(); ++k) r[k] = buf[k].real() / static_cast<double>(fft_len_);
    return r;
  }

  // Cycle-by-cycle peak picking inside each voiced stretch, seeded at the
  // most periodic frame and walking outwards one local period at a time.
  void extract_pulses(std::span<const double> x, PitchTrack& track) const {
    const std::size_t n = track.voicing.size();
    const double fs = opts_.sample_rate;
    std::size_t i = 0;
    while (i < n) {
      if (!track.voicing[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < n && track.voicing[j + 1]) ++j;
      const double t_begin = track.times_s[i] - 0.5 * opts_.time_step_s;
      const double t_end = track.times_s[j] + 0.5 * opts_.time_step_s;
      auto f0_at = [&](double t) {
        const double pos = (t - track.times_s[i]) / opts_.time_step_s;
        const auto k = static_cast<std::size_t>(std::clamp(std::lround(pos), 0L, static_cast<long>(j - i)));
        return track.f0_hz[i + k];
      };
      const auto lo = static_cast<long>(std::floor(t_begin * fs));
      const auto hi = static_cast<long>(std::ceil(t_end * fs));
      double pos_max = 0.0;
      double neg_max = 0.0;
      for (long s = std::max(lo, 0L); s <= std::min(hi, static_cast<long>(x.size()) - 1); ++s) {
        pos_max = std::max(pos_max, x[s]);
        neg_max = std::max(neg_max, -x[s]);
      }
      const double sign = pos_max >= neg_max ? 1.0 : -1.0;

      std::size_t seed = i;
      for (std::size_t k = i; k <= j; ++k) {
        if (track.peak_autocorr[k] > track.peak_autocorr[seed]) seed = k;
      }
      const double tc = track.times_s[seed];
      const double period0 = 1.0 / track.f0_hz[seed];
      GlottalPulse first;
      std::vector<GlottalPulse> train;
      if (detail::find_peak(x, sign, std::lround((tc - 0.5 * period0) * fs),
                            std::lround((tc + 0.5 * period0) * fs), fs, first) &&
          first.amplitude > 0.0) {
        std::vector<GlottalPulse> back;
        GlottalPulse cur = first;
        while (true) {
          const double period = 1.0 / f0_at(cur.time_s);
          const double a = cur.time_s - 1.2 * period;
          const double b = cur.time_s - 0.8 * period;
          if (a < t_begin) break;
          GlottalPulse p;
          if (!detail::find_peak(x, sign, std::lround(a * fs), std::lround(b * fs), fs, p) ||
              p.amplitude <= 0.0) {
            break;
          }
          back.push_back(p);
          cur = p;
        }
        train.assign(back.rbegin(), back.rend());
        train.push_back(first);
        cur = first;
        while (true) {
          const double period = 1.0 / f0_at(cur.time_s);
          const double a = cur.time_s + 0.8 * period;
          const double b = cur.time_s + 1.2 * period;
          if (b > t_end) break;
          GlottalPulse p;
          if (!detail::find_peak(x, sign, std::lround(a * fs), std::lround(b * fs), fs, p) ||
              p.amplitude <= 0.0) {
            break;
          }
          train.push_back(p);
          cur = p;
        }
      }
      if (train.size() >= 2) {
        for (std::size_t k = 1; k < train.size(); ++k) {
          const double period = train[k].time_s - train[k - 1].time_s;
          if (period > 0.0) track.periods_s.push_back(period);
        }
        track.pulse_trains.push_back(std::move(train));
      }
      i = j + 1;
    }
  }

  PitchOptions opts_;
  std::size_t window_len_ = 0;
  std::size_t fft_len_ = 0;
  std::vector<double> window_;
  std::vector<double> window_ac_;
};

inline PitchTrack track_pitch(std::span<const double> signal) {
  static const PitchTracker tracker;
  return tracker(signal);
}

}  // namespace entrain::dsp
