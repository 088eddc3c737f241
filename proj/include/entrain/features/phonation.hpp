#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "entrain/dsp/pitch.hpp"
#include "entrain/stats.hpp"

namespace entrain::features {

inline constexpr std::size_t kPhonationFeatures = 24;
inline constexpr std::array<std::string_view, kPhonationFeatures> kPhonationNames{
    "f0_mean",          "f0_median",        "f0_std",          "f0_min",
    "f0_max",           "f0_range",         "f0_mad",          "jitter_local_pct",
    "jitter_abs_s",     "jitter_rap_pct",   "jitter_ppq5_pct", "jitter_ddp_pct",
    "shimmer_local_pct", "shimmer_local_db", "shimmer_apq3_pct", "shimmer_apq5_pct",
    "shimmer_apq11_pct", "shimmer_dda_pct", "hnr_mean_db",     "hnr_std_db",
    "hnr_min_db",       "hnr_max_db",       "voiced_fraction", "autocorr_peak_mean"};

namespace phon {
enum Slot : std::size_t {
  F0Mean, F0Median, F0Std, F0Min, F0Max, F0Range, F0Mad,
  JitterLocal, JitterAbs, JitterRap, JitterPpq5, JitterDdp,
  ShimmerLocal, ShimmerDb, ShimmerApq3, ShimmerApq5, ShimmerApq11, ShimmerDda,
  HnrMean, HnrStd, HnrMin, HnrMax, VoicedFraction, AutocorrPeak
};
}  // namespace phon

struct Phonation {
  std::array<double, kPhonationFeatures> values;
  std::array<bool, kPhonationFeatures> missing;
};

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs of consecutive periods and matching pulse amplitudes, split wherever
// neighbouring periods violate the period bounds or factor.
struct Cycles {
  std::vector<std::vector<double>> periods;
  std::vector<std::vector<double>> amplitudes;  // one per pulse
};

inline Cycles usable_cycles(const dsp::PitchTrack& track, const dsp::PitchOptions& opts) {
  Cycles out;
  for (const auto& train : track.pulse_trains) {
    std::vector<double> per;
    std::vector<double> amp;
    auto flush = [&] {
      if (!per.empty()) {
        out.periods.push_back(std::move(per));
        out.amplitudes.push_back(std::move(amp));
      }
      per.clear();
      amp.clear();
    };
    for (std::size_t k = 1; k < train.size(); ++k) {
      const double t = train[k].time_s - train[k - 1].time_s;
      const bool in_range = t >= opts.shortest_period_s && t <= opts.longest_period_s;
      const bool smooth = per.empty() || (t <= opts.max_period_factor * per.back() &&
                                          per.back() <= opts.max_period_factor * t);
      if (!in_range || !smooth) flush();
      if (!in_range) continue;
      if (per.empty()) amp.push_back(train[k - 1].amplitude);
      per.push_back(t);
      amp.push_back(train[k].amplitude);
    }
    flush();
  }
  return out;
}

// Mean over every position that has a full centred window of `width` of
// |x_i - local average|, divided by the overall mean. NaN if no window fits.
inline double perturbation_quotient(const std::vector<std::vector<double>>& runs, std::size_t width) {
  double dev = 0.0, total = 0.0;
  std::size_t n_dev = 0, n_total = 0;
  const std::size_t half = width / 2;
  for (const auto& r : runs) {
    for (double v : r) total += v;
    n_total += r.size();
    if (r.size() < width) continue;
    for (std::size_t i = half; i + half < r.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = i - half; j <= i + half; ++j) s += r[j];
      dev += std::abs(r[i] - s / static_cast<double>(width));
      ++n_dev;
    }
  }
  if (n_dev == 0 || total <= 0.0) return kNaN;
  return (dev / static_cast<double>(n_dev)) / (total / static_cast<double>(n_total));
}

inline double mean_abs_difference(const std::vector<std::vector<double>>& runs, bool relative) {
  double dev = 0.0, total = 0.0;
  std::size_t n_dev = 0, n_total = 0;
  for (const auto& r : runs) {
    for (double v : r) total += v;
    n_total += r.size();
    for (std::size_t i = 1; i < r.size(); ++i) {
      dev += std::abs(r[i] - r[i - 1]);
      ++n_dev;
    }
  }
  if (n_dev == 0) return kNaN;
  const double d = dev / static_cast<double>(n_dev);
  return relative ? d / (total / static_cast<double>(n_total)) : d;
}

inline double mean_abs_second_difference(const std::vector<std::vector<double>>& runs) {
  double dev = 0.0, total = 0.0;
  std::size_t n_dev = 0, n_total = 0;
  for (const auto& r : runs) {
    for (double v : r) total += v;
    n_total += r.size();
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      dev += std::abs((r[i + 1] - r[i]) - (r[i] - r[i - 1]));
      ++n_dev;
    }
  }
  if (n_dev == 0 || total <= 0.0) return kNaN;
  return (dev / static_cast<double>(n_dev)) / (total / static_cast<double>(n_total));
}

inline double mean_abs_db_step(const std::vector<std::vector<double>>& runs) {
  double dev = 0.0;
  std::size_t n = 0;
  for (const auto& r : runs) {
    for (std::size_t i = 1; i < r.size(); ++i) {
      if (r[i] > 0.0 && r[i - 1] > 0.0) {
        dev += std::abs(20.0 * std::log10(r[i] / r[i - 1]));
        ++n;
      }
    }
  }
  return n == 0 ? kNaN : dev / static_cast<double>(n);
}

}  // namespace detail

/// Harmonics-to-noise ratio in dB from a normalized autocorrelation peak.
inline double hnr_db(double r) {
  const double c = std::clamp(r, 1e-6, 1.0 - 1e-6);
  return 10.0 * std::log10(c / (1.0 - c));
}

/// 24 voice measures from a pitch track. Everything is missing when fewer
/// than two usable periods exist; otherwise individual measures are missing
/// only when too few periods support them.
inline Phonation phonation_from_track(const dsp::PitchTrack& track, const dsp::PitchOptions& opts = {}) {
  Phonation p;
  p.values.fill(detail::kNaN);
  const auto cycles = detail::usable_cycles(track, opts);
  std::size_t n_periods = 0;
  for (const auto& r : cycles.periods) n_periods += r.size();
  if (n_periods < 2 || track.voiced_count() == 0) {
    p.missing.fill(true);
    return p;
  }
  using namespace phon;
  std::vector<double> f0;
  std::vector<double> hnr;
  for (std::size_t i = 0; i < track.voicing.size(); ++i) {
    if (!track.voicing[i]) continue;
    f0.push_back(track.f0_hz[i]);
    hnr.push_back(hnr_db(track.peak_autocorr[i]));
  }
  auto& v = p.values;
  v[F0Mean] = stats::mean(f0);
  v[F0Median] = stats::median(f0);
  v[F0Std] = stats::stddev(f0);
  v[F0Min] = stats::min(f0);
  v[F0Max] = stats::max(f0);
  v[F0Range] = stats::range(f0);
  v[F0Mad] = stats::mean_abs_deviation(f0);

  v[JitterLocal] = 100.0 * detail::mean_abs_difference(cycles.periods, true);
  v[JitterAbs] = detail::mean_abs_difference(cycles.periods, false);
  v[JitterRap] = 100.0 * detail::perturbation_quotient(cycles.periods, 3);
  v[JitterPpq5] = 100.0 * detail::perturbation_quotient(cycles.periods, 5);
  v[JitterDdp] = 100.0 * detail::mean_abs_second_difference(cycles.periods);

  v[ShimmerLocal] = 100.0 * detail::mean_abs_difference(cycles.amplitudes, true);
  v[ShimmerDb] = detail::mean_abs_db_step(cycles.amplitudes);
  v[ShimmerApq3] = 100.0 * detail::perturbation_quotient(cycles.amplitudes, 3);
  v[ShimmerApq5] = 100.0 * detail::perturbation_quotient(cycles.amplitudes, 5);
  v[ShimmerApq11] = 100.0 * detail::perturbation_quotient(cycles.amplitudes, 11);
  v[ShimmerDda] = 100.0 * detail::mean_abs_second_difference(cycles.amplitudes);

  v[HnrMean] = stats::mean(hnr);
  v[HnrStd] = stats::stddev(hnr);
  v[HnrMin] = stats::min(hnr);
  v[HnrMax] = stats::max(hnr);
  v[VoicedFraction] = static_cast<double>(track.voiced_count()) / static_cast<double>(track.voicing.size());
  v[AutocorrPeak] = stats::mean(track.peak_autocorr);
  for (std::size_t i = 0; i < kPhonationFeatures; ++i) p.missing[i] = !std::isfinite(v[i]);
  return p;
}

inline Phonation phonation(std::span<const double> signal) {
  static const dsp::PitchTracker tracker;
  return phonation_from_track(tracker(signal), tracker.options());
}

}  // namespace entrain::features
