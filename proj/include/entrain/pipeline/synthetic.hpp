#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "entrain/corpus/annotation.hpp"
#include "entrain/corpus/audio.hpp"
#include "entrain/corpus/feature_cache.hpp"
#include "entrain/corpus/labels.hpp"
#include "entrain/corpus/manifest.hpp"
#include "entrain/corpus/wav.hpp"
#include "entrain/error.hpp"
#include "entrain/features/names.hpp"
#include "entrain/rng.hpp"
#include "entrain/types.hpp"

// Desk-scale stand-in corpus. Speaker A's turns follow a stationary AR(1)
// process; speaker B's turn t mixes A's turn t with B's own process:
//   B(t) = alpha * A(t) + (1 - alpha) * own(t) + noise.
namespace entrain::pipeline {

enum class LabelRule {
  Threshold,   // high iff alpha > threshold
  Alternating  // even conversations low, odd ones high, whatever alpha is
};

inline std::string_view to_string(LabelRule r) { return r == LabelRule::Threshold ? "threshold" : "alternating"; }

inline LabelRule parse_label_rule(std::string_view s) {
  if (s == "threshold") return LabelRule::Threshold;
  if (s == "alternating") return LabelRule::Alternating;
  throw ValidationError("unknown label rule '" + std::string(s) + "'");
}

struct SyntheticSpec {
  std::size_t n_conversations = 40;
  std::size_t turns_per_speaker = 30;
  // Even-numbered conversations get alpha_low, odd-numbered ones alpha_high.
  double alpha_low = 0.2;
  double alpha_high = 0.8;
  double noise_scale = 0.1;
  double persistence = 0.5;  // lag-one autocorrelation of each speaker's own process
  double threshold = 0.5;
  LabelRule label_rule = LabelRule::Threshold;
  bool audio = false;

  void validate() const {
    if (n_conversations < 4) throw ValidationError("synthetic corpus needs at least 4 conversations");
    if (turns_per_speaker < 2) throw ValidationError("synthetic corpus needs at least 2 turns per speaker");
    for (double a : {alpha_low, alpha_high}) {
      if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
    }
    if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) throw ValidationError("noise scale must be >= 0");
    if (!(persistence >= 0.0 && persistence < 1.0)) throw ValidationError("persistence must lie in [0, 1)");
  }

  double alpha_for(std::size_t i) const { return i % 2 == 0 ? alpha_low : alpha_high; }

  SuccessLabel label_for(std::size_t i) const {
    const bool high = label_rule == LabelRule::Threshold ? alpha_for(i) > threshold : i % 2 == 1;
    return high ? SuccessLabel::High : SuccessLabel::Low;
  }

  nlohmann::json json() const {
    return {{"n_conversations", n_conversations}, {"turns_per_speaker", turns_per_speaker},
            {"alpha_low", alpha_low},             {"alpha_high", alpha_high},
            {"noise_scale", noise_scale},         {"persistence", persistence},
            {"threshold", threshold},             {"label_rule", to_string(label_rule)},
            {"audio", audio}};
  }
};

inline std::string synthetic_dyad_id(std::size_t i) {
  std::string digits = std::to_string(i + 1);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "syn" + digits;
}

namespace detail {

/// Latent standardized turn values for both speakers, rows alternate A, B.
inline Eigen::MatrixXd latent_turns(const SyntheticSpec& spec, double alpha, std::size_t dims, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const double rho = spec.persistence;
  const double innov = std::sqrt(1.0 - rho * rho);
  const auto turns = spec.turns_per_speaker;
  Eigen::MatrixXd z(static_cast<Eigen::Index>(2 * turns), static_cast<Eigen::Index>(dims));
  Eigen::VectorXd a(static_cast<Eigen::Index>(dims)), own(static_cast<Eigen::Index>(dims));
  for (std::size_t t = 0; t < turns; ++t) {
    for (std::size_t j = 0; j < dims; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      a[jj] = t == 0 ? nd(rng) : rho * a[jj] + innov * nd(rng);
      own[jj] = t == 0 ? nd(rng) : rho * own[jj] + innov * nd(rng);
      const double noise = spec.noise_scale * nd(rng);
      z(static_cast<Eigen::Index>(2 * t), jj) = a[jj];
      z(static_cast<Eigen::Index>(2 * t + 1), jj) = alpha * a[jj] + (1.0 - alpha) * own[jj] + noise;
    }
  }
  return z;
}

inline std::vector<Utterance> alternating_timeline(std::size_t n, double min_dur, double max_dur, Rng& rng) {
  std::uniform_real_distribution<double> dur(min_dur, max_dur);
  std::uniform_real_distribution<double> gap(0.15, 0.6);
  std::vector<Utterance> out;
  double t = 0.25;
  for (std::size_t i = 0; i < n; ++i) {
    Utterance u;
    u.speaker_id = i % 2 == 0 ? "A" : "B";
    u.start_s = t;
    u.end_s = t + dur(rng);
    u.source_row = i;
    t = u.end_s + gap(rng);
    out.push_back(u);
  }
  return out;
}

inline int differences_for(SuccessLabel label, Rng& rng) {
  std::uniform_int_distribution<int> low(corpus::kMinDifferences, corpus::kMedianDifferences - 1);
  std::uniform_int_distribution<int> high(corpus::kMedianDifferences + 1, corpus::kMaxDifferences);
  return label == SuccessLabel::High ? high(rng) : low(rng);
}

}  // namespace detail

struct SyntheticConversation {
  ConversationRecord record;
  SuccessLabel label = SuccessLabel::Low;
  double alpha = 0.0;
  Eigen::MatrixXd features;  // utterances x 418, row i = utterance i
};

/// Feature-level corpus. Each conversation draws from its own named stream,
/// so adding conversations leaves existing ones unchanged.
inline std::vector<SyntheticConversation> synthesize(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  auto marg = make_rng(seed, "synthetic/marginals");
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> logscale(-1.0, 1.0);
  Eigen::VectorXd mu(static_cast<Eigen::Index>(kFeatureDims)), sigma(static_cast<Eigen::Index>(kFeatureDims));
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    mu[j] = 3.0 * nd(marg);
    sigma[j] = std::exp(logscale(marg));
  }
  std::vector<SyntheticConversation> out;
  for (std::size_t i = 0; i < spec.n_conversations; ++i) {
    SyntheticConversation c;
    c.record.dyad_id = synthetic_dyad_id(i);
    c.alpha = spec.alpha_for(i);
    c.label = spec.label_for(i);
    auto rng = make_rng(seed, "synthetic/" + c.record.dyad_id);
    c.record.differences_found = detail::differences_for(c.label, rng);
    const Eigen::MatrixXd z = detail::latent_turns(spec, c.alpha, kFeatureDims, rng);
    c.features = (z.array().rowwise() * sigma.transpose().array()).rowwise() + mu.transpose().array();
    c.record.utterances = detail::alternating_timeline(static_cast<std::size_t>(z.rows()), 0.8, 2.5, rng);
    out.push_back(std::move(c));
  }
  return out;
}

struct SyntheticAudioConversation {
  ConversationRecord record;
  SuccessLabel label = SuccessLabel::Low;
  double alpha = 0.0;
  std::array<corpus::AudioTrack, 2> tracks;  // A, B at 16 kHz
};

/// One voiced utterance: a glottal pulse train through a two-pole resonator,
/// amplitude-modulated at a syllable-like rate, plus breath noise.
inline std::vector<double> voiced_utterance(double duration_s, double f0_hz, double formant_hz, double am_hz,
                                            double amplitude, double breath, Rng& rng, double fs = 16000.0) {
  const auto n = static_cast<std::size_t>(duration_s * fs);
  std::vector<double> pulses(n, 0.0);
  std::uniform_real_distribution<double> wobble(-0.005, 0.005);
  for (double t = 0.0; t < duration_s; t += (1.0 + wobble(rng)) / f0_hz) {
    const auto k = static_cast<std::size_t>(t * fs);
    if (k < n) pulses[k] = 1.0;
  }
  const double r = std::exp(-std::numbers::pi * 120.0 / fs);
  const double c1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * formant_hz / fs);
  const double c2 = -r * r;
  std::vector<double> y(n, 0.0);
  std::normal_distribution<double> nd(0.0, 1.0);
  double y1 = 0.0, y2 = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = pulses[i] + c1 * y1 + c2 * y2;
    y2 = y1;
    y1 = v;
    y[i] = v;
    peak = std::max(peak, std::abs(v));
  }
  const double ramp = 0.02 * fs;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double fade = std::min({1.0, static_cast<double>(i) / ramp, static_cast<double>(n - i) / ramp});
    const double am = 1.0 + 0.6 * std::sin(2.0 * std::numbers::pi * am_hz * t);
    y[i] = amplitude * fade * (am * y[i] / (1.6 * peak) + breath * nd(rng));
  }
  return y;
}

/// Audio corpus with the same turn structure. The latent turn values drive
/// five voice parameters: f0, formant, modulation rate, level and breathiness.
inline std::vector<SyntheticAudioConversation> synthesize_audio(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  constexpr double fs = corpus::kTargetSampleRate;
  std::vector<SyntheticAudioConversation> out;
  for (std::size_t i = 0; i < spec.n_conversations; ++i) {
    SyntheticAudioConversation c;
    c.record.dyad_id = synthetic_dyad_id(i);
    c.alpha = spec.alpha_for(i);
    c.label = spec.label_for(i);
    auto rng = make_rng(seed, "synthetic-audio/" + c.record.dyad_id);
    c.record.differences_found = detail::differences_for(c.label, rng);
    const Eigen::MatrixXd z = detail::latent_turns(spec, c.alpha, 5, rng);
    c.record.utterances = detail::alternating_timeline(static_cast<std::size_t>(z.rows()), 0.7, 1.3, rng);
    const double total = c.record.utterances.back().end_s + 0.25;
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::size_t s = 0; s < 2; ++s) {
      c.tracks[s].speaker_id = s == 0 ? "A" : "B";
      c.tracks[s].sample_rate = corpus::kTargetSampleRate;
      c.tracks[s].samples.resize(static_cast<std::size_t>(total * fs));
      for (double& v : c.tracks[s].samples) v = 1e-4 * nd(rng);
    }
    for (std::size_t u = 0; u < c.record.utterances.size(); ++u) {
      const auto& utt = c.record.utterances[u];
      const auto r = static_cast<Eigen::Index>(u);
      const auto wave = voiced_utterance(utt.duration_s(), 140.0 * std::exp(0.2 * z(r, 0)),
                                         650.0 * std::exp(0.2 * z(r, 1)), 4.0 * std::exp(0.2 * z(r, 2)),
                                         0.3 * std::exp(0.25 * z(r, 3)), 0.05 * std::exp(0.4 * z(r, 4)), rng);
      auto& track = c.tracks[u % 2].samples;
      const auto start = static_cast<std::size_t>(std::lround(utt.start_s * fs));
      for (std::size_t k = 0; k < wave.size() && start + k < track.size(); ++k) track[start + k] = wave[k];
    }
    out.push_back(std::move(c));
  }
  return out;
}

/// Writes a corpus directory: manifest.json, truth.json and either feature
/// caches (features/) or audio plus annotations (audio/, annotations/).
/// Manifest paths are relative so the directory can be moved.
inline corpus::Manifest write_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed,
                                               const std::filesystem::path& dir) {
  corpus::Manifest m;
  nlohmann::json truth = nlohmann::json::array();
  const std::vector<std::string> stamp{"synthetic seed " + std::to_string(seed)};
  auto add = [&](const ConversationRecord& r, SuccessLabel label, double alpha) {
    corpus::DyadEntry e;
    e.dyad_id = r.dyad_id;
    e.differences_found = *r.differences_found;
    truth.push_back({{"dyad_id", r.dyad_id}, {"alpha", alpha}, {"label", to_string(label)}});
    return e;
  };
  if (spec.audio) {
    for (const auto& c : synthesize_audio(spec, seed)) {
      auto e = add(c.record, c.label, c.alpha);
      e.audio_a = "audio/" + e.dyad_id + "_A.wav";
      e.audio_b = "audio/" + e.dyad_id + "_B.wav";
      e.annotations = "annotations/" + e.dyad_id + ".csv";
      corpus::csv::write_atomic(dir / e.audio_a, corpus::encode_wav(c.tracks[0].samples, c.tracks[0].sample_rate));
      corpus::csv::write_atomic(dir / e.audio_b, corpus::encode_wav(c.tracks[1].samples, c.tracks[1].sample_rate));
      corpus::csv::write_atomic(dir / e.annotations, corpus::format_annotations(c.record.utterances));
      m.dyads.push_back(std::move(e));
    }
  } else {
    for (const auto& c : synthesize(spec, seed)) {
      auto e = add(c.record, c.label, c.alpha);
      e.features = "features/" + e.dyad_id + ".csv";
      corpus::FeatureTable t{features::feature_names(), c.record.utterances, c.features};
      corpus::write_feature_cache(dir / e.features, t, stamp);
      m.dyads.push_back(std::move(e));
    }
  }
  corpus::csv::write_atomic(dir / "manifest.json", corpus::to_json(m).dump(2) + "\n");
  const nlohmann::json doc{{"seed", seed}, {"spec", spec.json()}, {"conversations", truth}};
  corpus::csv::write_atomic(dir / "truth.json", doc.dump(2) + "\n");
  return m;
}

}  // namespace entrain::pipeline
