#pragma once

#include <algorithm>
#include <array>
#include <random>
#include <string>
#include <vector>

#include "entrain/error.hpp"
#include "entrain/rng.hpp"
#include "entrain/types.hpp"

namespace entrain::sham {

inline constexpr std::size_t kShamsPerDyad = 2;
inline constexpr std::size_t kMinTurnsPerSpeaker = 6;

/// Block order applied to the moved speaker in each sham: the two cyclic
/// derangements of (A, B, C).
inline constexpr std::array<std::array<std::size_t, 3>, kShamsPerDyad> kShamBlockOrders{{
    {1, 2, 0},
    {2, 0, 1},
}};

/// Maximal run of consecutive same-speaker utterances in midpoint order.
struct Turn {
  std::string speaker_id;
  std::vector<Utterance> utterances;

  double start_s() const { return utterances.front().start_s; }
  double end_s() const { return utterances.back().end_s; }
  double midpoint_s() const { return 0.5 * (start_s() + end_s()); }
};

inline std::vector<Turn> split_turns(const std::vector<Utterance>& midpoint_ordered) {
  std::vector<Turn> turns;
  for (const auto& u : midpoint_ordered) {
    if (turns.empty() || turns.back().speaker_id != u.speaker_id) turns.push_back({u.speaker_id, {}});
    turns.back().utterances.push_back(u);
  }
  return turns;
}

struct BlockRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

/// Three contiguous ranges covering [0, n) whose sizes differ by at most one,
/// larger blocks first.
inline std::array<BlockRange, 3> balanced_thirds(std::size_t n) {
  std::array<BlockRange, 3> out;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < 3; ++b) {
    const std::size_t len = n / 3 + (b < n % 3 ? 1 : 0);
    out[b] = {pos, pos + len};
    pos += len;
  }
  return out;
}

struct BlockPlan {
  std::string fixed_speaker;
  std::string moved_speaker;
  std::array<BlockRange, 3> fixed_blocks;
  std::array<BlockRange, 3> moved_blocks;
};

struct InterleaveResult {
  std::vector<Utterance> utterances;
  double speaker_change_fraction = 0.0;  // changes / (n - 1)
};

/// Stable merge of two midpoint-ordered utterance streams.
inline InterleaveResult interleave_turns(const std::vector<Utterance>& a, const std::vector<Utterance>& b) {
  InterleaveResult out;
  out.utterances.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.utterances), midpoint_less);
  std::size_t changes = 0;
  for (std::size_t i = 1; i < out.utterances.size(); ++i) {
    if (out.utterances[i].speaker_id != out.utterances[i - 1].speaker_id) ++changes;
  }
  if (out.utterances.size() > 1) {
    out.speaker_change_fraction = static_cast<double>(changes) / static_cast<double>(out.utterances.size() - 1);
  }
  return out;
}

/// Which speaker stays in place is the only seeded choice.
inline BlockPlan plan_shams(const ConversationRecord& real, std::uint64_t seed) {
  const auto speakers = real.speakers();
  const auto turns = split_turns(real.utterances);
  std::array<std::size_t, 2> counts{};
  for (const auto& t : turns) ++counts[t.speaker_id == speakers[0] ? 0 : 1];
  if (counts[0] < kMinTurnsPerSpeaker || counts[1] < kMinTurnsPerSpeaker) {
    throw ValidationError("conversation too short for thirds");
  }
  auto rng = make_rng(seed, "sham/" + real.dyad_id);
  const std::size_t fixed = std::bernoulli_distribution(0.5)(rng) ? 1 : 0;
  BlockPlan plan;
  plan.fixed_speaker = speakers[fixed];
  plan.moved_speaker = speakers[1 - fixed];
  plan.fixed_blocks = balanced_thirds(counts[fixed]);
  plan.moved_blocks = balanced_thirds(counts[1 - fixed]);
  return plan;
}

/// Turn sequence of the moved speaker after applying `order` to its blocks.
inline std::vector<Turn> reorder_blocks(const std::vector<Turn>& turns, const std::array<BlockRange, 3>& blocks,
                                        const std::array<std::size_t, 3>& order) {
  std::vector<Turn> out;
  out.reserve(turns.size());
  for (std::size_t b : order) {
    for (std::size_t i = blocks[b].begin; i < blocks[b].end; ++i) out.push_back(turns[i]);
  }
  return out;
}

/// Moves the k-th reordered turn so its midpoint lands on the k-th original
/// turn's midpoint. Utterance durations and within-turn spacing are kept.
inline std::vector<Utterance> restamp(const std::vector<Turn>& original, const std::vector<Turn>& reordered) {
  std::vector<Utterance> out;
  for (std::size_t k = 0; k < reordered.size(); ++k) {
    const double shift = original[k].midpoint_s() - reordered[k].midpoint_s();
    for (auto u : reordered[k].utterances) {
      u.start_s += shift;
      u.end_s += shift;
      out.push_back(std::move(u));
    }
  }
  sort_by_midpoint(out);
  return out;
}

/// Two within-conversation shams. Utterances keep their `source_row`, so a
/// sham's feature rows are a permutation of the real conversation's rows.
inline std::array<ConversationRecord, kShamsPerDyad> build_shams(const ConversationRecord& real,
                                                                 std::uint64_t seed) {
  if (real.kind != ConversationKind::Real) throw ValidationError("shams are built from real conversations");
  const auto plan = plan_shams(real, seed);
  std::vector<Turn> moved_turns;
  std::vector<Utterance> fixed_utts;
  for (auto& t : split_turns(real.utterances)) {
    if (t.speaker_id == plan.moved_speaker) {
      moved_turns.push_back(std::move(t));
    } else {
      fixed_utts.insert(fixed_utts.end(), t.utterances.begin(), t.utterances.end());
    }
  }
  std::array<ConversationRecord, kShamsPerDyad> shams;
  for (std::size_t s = 0; s < kShamsPerDyad; ++s) {
    const auto reordered = reorder_blocks(moved_turns, plan.moved_blocks, kShamBlockOrders[s]);
    auto& out = shams[s];
    out.dyad_id = real.dyad_id;
    out.kind = ConversationKind::Sham;
    out.sham_index = static_cast<int>(s + 1);
    out.differences_found = real.differences_found;
    out.utterances = interleave_turns(fixed_utts, restamp(moved_turns, reordered)).utterances;
  }
  return shams;
}

}  // namespace entrain::sham
