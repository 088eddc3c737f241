#pragma once

#include <string>
#include <vector>

namespace entrain::corpus {

inline constexpr int kTargetSampleRate = 16000;

/// Mono PCM audio for one speaker, samples in [-1, 1].
struct AudioTrack {
  std::vector<double> samples;
  int sample_rate = kTargetSampleRate;
  std::string speaker_id;

  double duration_s() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
  }
};

}  // namespace entrain::corpus
