#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "entrain/corpus/annotation.hpp"
#include "entrain/corpus/audio.hpp"
#include "entrain/corpus/preprocess.hpp"
#include "entrain/corpus/wav.hpp"
#include "entrain/types.hpp"

namespace entrain::corpus {

struct LoadRequest {
  std::string dyad_id;
  std::filesystem::path audio_a;
  std::filesystem::path audio_b;
  std::filesystem::path annotations;
  std::string speaker_a = "A";
  std::string speaker_b = "B";
  std::optional<int> differences_found;
  double reference_rms = kDefaultReferenceRms;
};

struct LoadedConversation {
  ConversationRecord record;
  std::array<AudioTrack, 2> tracks;  // speaker_a, speaker_b
  std::array<LoudnessResult, 2> loudness;

  const AudioTrack& track_for(const std::string& speaker_id) const {
    for (const auto& t : tracks) {
      if (t.speaker_id == speaker_id) return t;
    }
    throw ValidationError("no audio track for speaker '" + speaker_id + "'");
  }
};

/// Resamples each track to 16 kHz, then loudness-normalizes it (so the final
/// peak bound also covers resampler overshoot), and attaches the filtered,
/// midpoint-ordered utterances.
inline LoadedConversation load_conversation(const LoadRequest& req) {
  if (req.speaker_a == req.speaker_b) throw ValidationError("speaker ids must differ");
  LoadedConversation out;
  const std::array<std::pair<std::filesystem::path, std::string>, 2> inputs{
      {{req.audio_a, req.speaker_a}, {req.audio_b, req.speaker_b}}};
  for (std::size_t i = 0; i < 2; ++i) {
    auto track = resample_to_16k(read_wav(inputs[i].first, inputs[i].second));
    out.loudness[i] = normalize_loudness(track, req.reference_rms);
    out.tracks[i] = out.loudness[i].track;
  }
  auto raw = read_annotations(req.annotations, {req.speaker_a, req.speaker_b});
  for (const auto& u : raw) {
    const double dur = out.track_for(u.speaker_id).duration_s();
    if (u.start_s >= dur) {
      throw ValidationError(req.annotations.string() + ": utterance at " + std::to_string(u.start_s) +
                            " s starts beyond the end of speaker '" + u.speaker_id + "' audio");
    }
  }
  out.record.dyad_id = req.dyad_id;
  out.record.kind = ConversationKind::Real;
  out.record.differences_found = req.differences_found;
  out.record.utterances = prepare_utterances(std::move(raw));
  return out;
}

/// Samples of one utterance from its speaker's 16 kHz track (clipped to the
/// track end).
inline std::vector<double> utterance_samples(const AudioTrack& track, const Utterance& u) {
  const auto n = static_cast<long>(track.samples.size());
  const long a = std::clamp(static_cast<long>(std::lround(u.start_s * track.sample_rate)), 0L, n);
  const long b = std::clamp(static_cast<long>(std::lround(u.end_s * track.sample_rate)), a, n);
  return {track.samples.begin() + a, track.samples.begin() + b};
}

}  // namespace entrain::corpus
