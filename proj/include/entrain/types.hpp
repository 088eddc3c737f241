#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entrain/error.hpp"

namespace entrain {

/// One inter-pausal unit from a single speaker.
///
/// `source_row` indexes the conversation's feature matrix. Shams reorder and
/// re-time utterances but keep pointing at the rows of the real conversation.
struct Utterance {
  std::string speaker_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::size_t source_row = 0;

  double midpoint_s() const { return 0.5 * (start_s + end_s); }
  double duration_s() const { return end_s - start_s; }

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

/// Midpoint order with ties broken by start time, then speaker id.
inline bool midpoint_less(const Utterance& a, const Utterance& b) {
  const double ma = a.midpoint_s();
  const double mb = b.midpoint_s();
  if (ma != mb) return ma < mb;
  if (a.start_s != b.start_s) return a.start_s < b.start_s;
  return a.speaker_id < b.speaker_id;
}

inline void sort_by_midpoint(std::vector<Utterance>& utterances) {
  std::stable_sort(utterances.begin(), utterances.end(), midpoint_less);
}

enum class ConversationKind { Real, Sham };

inline std::string_view to_string(ConversationKind kind) {
  return kind == ConversationKind::Real ? "real" : "sham";
}

inline ConversationKind parse_conversation_kind(std::string_view text) {
  if (text == "real") return ConversationKind::Real;
  if (text == "sham") return ConversationKind::Sham;
  throw FormatError("unknown conversation kind '" + std::string(text) + "'");
}

struct ConversationRecord {
  std::string dyad_id;
  std::vector<Utterance> utterances;  // midpoint-ordered
  ConversationKind kind = ConversationKind::Real;
  std::optional<int> sham_index;
  std::optional<int> differences_found;

  /// The two speaker ids in lexicographic order.
  std::array<std::string, 2> speakers() const {
    std::vector<std::string> ids;
    for (const auto& u : utterances) {
      if (std::find(ids.begin(), ids.end(), u.speaker_id) == ids.end()) {
        ids.push_back(u.speaker_id);
      }
    }
    if (ids.size() != 2) {
      throw ValidationError("conversation '" + dyad_id + "' has " +
                            std::to_string(ids.size()) +
                            " distinct speakers, expected 2");
    }
    std::sort(ids.begin(), ids.end());
    return {ids[0], ids[1]};
  }

  void validate() const {
    for (std::size_t i = 0; i < utterances.size(); ++i) {
      if (!(utterances[i].end_s > utterances[i].start_s)) {
        throw ValidationError("utterance " + std::to_string(i) +
                              " of '" + dyad_id + "' has end <= start");
      }
      if (i > 0 && midpoint_less(utterances[i], utterances[i - 1])) {
        throw ValidationError("utterances of '" + dyad_id +
                              "' are not midpoint-ordered");
      }
    }
    (void)speakers();
  }
};

enum class SuccessLabel { Low, High, Excluded };

inline std::string_view to_string(SuccessLabel label) {
  switch (label) {
    case SuccessLabel::Low: return "low";
    case SuccessLabel::High: return "high";
    case SuccessLabel::Excluded: return "excluded";
  }
  return "excluded";
}

/// The five per-utterance feature blocks, in canonical column order.
enum class FeatureSetId { MfccStats, Ems, Ltas, Phonation, Intensity };

struct FeatureBlock {
  FeatureSetId id;
  std::string_view name;
  std::size_t offset;
  std::size_t size;
};

inline constexpr std::size_t kMfccStatsDims = 234;
inline constexpr std::size_t kEmsDims = 60;
inline constexpr std::size_t kLtasDims = 99;
inline constexpr std::size_t kPhonationDims = 24;
inline constexpr std::size_t kIntensityDims = 1;
inline constexpr std::size_t kFeatureDims =
    kMfccStatsDims + kEmsDims + kLtasDims + kPhonationDims + kIntensityDims;
static_assert(kFeatureDims == 418);

inline constexpr std::array<FeatureBlock, 5> kFeatureBlocks{{
    {FeatureSetId::MfccStats, "mfcc", 0, kMfccStatsDims},
    {FeatureSetId::Ems, "ems", kMfccStatsDims, kEmsDims},
    {FeatureSetId::Ltas, "ltas", kMfccStatsDims + kEmsDims, kLtasDims},
    {FeatureSetId::Phonation, "phonation",
     kMfccStatsDims + kEmsDims + kLtasDims, kPhonationDims},
    {FeatureSetId::Intensity, "intensity",
     kMfccStatsDims + kEmsDims + kLtasDims + kPhonationDims, kIntensityDims},
}};

/// Feature sets that receive an LDA projection (intensity does not).
inline constexpr std::array<FeatureSetId, 4> kLdaFeatureSets{
    FeatureSetId::MfccStats, FeatureSetId::Ems, FeatureSetId::Ltas,
    FeatureSetId::Phonation};

inline constexpr const FeatureBlock& feature_block(FeatureSetId id) {
  return kFeatureBlocks[static_cast<std::size_t>(id)];
}

inline std::string_view to_string(FeatureSetId id) { return feature_block(id).name; }

inline FeatureSetId parse_feature_set(std::string_view text) {
  for (const auto& b : kFeatureBlocks) {
    if (b.name == text) return b.id;
  }
  throw FormatError("unknown feature set '" + std::string(text) + "'");
}

}  // namespace entrain
