#pragma once

#include <Eigen/Dense>

#include <array>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "entrain/error.hpp"
#include "entrain/features/names.hpp"
#include "entrain/lda/turn_differences.hpp"
#include "entrain/rng.hpp"
#include "entrain/stats.hpp"
#include "entrain/types.hpp"

namespace entrain::baselines {

inline constexpr std::size_t kProsodicFeatures = 6;
inline constexpr std::array<std::string_view, kProsodicFeatures> kProsodicNames{
    "mean_pitch", "max_pitch", "jitter_local", "shimmer_local", "mean_intensity", "mean_hnr"};
inline constexpr std::array<std::string_view, kProsodicFeatures> kProsodicSlots{
    "phon_f0_mean",          "phon_f0_max",       "phon_jitter_local_pct",
    "phon_shimmer_local_pct", "intensity_mean_db", "phon_hnr_mean_db"};
inline constexpr std::size_t kMinExchanges = 10;
inline constexpr std::size_t kBaselineDraws = 10;

inline std::size_t feature_index(std::string_view name) {
  const auto& names = features::feature_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw ValidationError("unknown feature '" + std::string(name) + "'");
}

inline std::array<std::size_t, kProsodicFeatures> prosodic_columns() {
  std::array<std::size_t, kProsodicFeatures> out{};
  for (std::size_t i = 0; i < kProsodicFeatures; ++i) out[i] = feature_index(kProsodicSlots[i]);
  return out;
}

/// A speaker change: rows of the outgoing turn's last utterance and the
/// incoming turn's first utterance, plus the change time.
struct Exchange {
  std::size_t prev_row = 0;
  std::size_t next_row = 0;
  std::string outgoing;
  double time_s = 0.0;
};

inline std::vector<Exchange> exchanges(const ConversationRecord& conv) {
  std::vector<Exchange> out;
  for (std::size_t i : lda::speaker_changes(conv)) {
    const auto& p = conv.utterances[i - 1];
    const auto& n = conv.utterances[i];
    out.push_back({p.source_row, n.source_row, p.speaker_id, n.midpoint_s()});
  }
  return out;
}

struct ProxConvSync {
  std::array<double, 3 * kProsodicFeatures> values{};  // proximity x6, convergence x6, synchrony x6
  std::array<bool, 3 * kProsodicFeatures> flagged{};   // undefined correlation replaced by 0
};

inline std::vector<std::string> prox_conv_sync_names() {
  std::vector<std::string> out;
  for (const char* m : {"proximity", "convergence", "synchrony"}) {
    for (auto f : kProsodicNames) out.push_back(std::string(m) + "_" + std::string(f));
  }
  return out;
}

/// Proximity, convergence and synchrony of each prosodic feature over the
/// given exchanges. `speaker_rows` lists each speaker's feature rows; the
/// proximity baseline compares the incoming utterance with random utterances
/// of the outgoing speaker other than the one adjacent to the change.
inline ProxConvSync prox_conv_sync(const std::vector<Exchange>& ex, const Eigen::MatrixXd& features,
                                   const std::map<std::string, std::vector<std::size_t>>& speaker_rows,
                                   Rng& rng) {
  if (ex.size() < kMinExchanges) {
    throw ValidationError("prox/conv/sync needs at least 10 turn exchanges (got " + std::to_string(ex.size()) + ")");
  }
  const auto cols = prosodic_columns();
  const std::size_t n = ex.size();
  // baseline partner rows are drawn once per exchange and shared by all features
  std::vector<std::array<std::size_t, kBaselineDraws>> draws(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> pool;
    for (std::size_t r : speaker_rows.at(ex[i].outgoing)) {
      if (r != ex[i].prev_row) pool.push_back(r);
    }
    if (pool.empty()) pool.push_back(ex[i].prev_row);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (auto& d : draws[i]) d = pool[pick(rng)];
  }
  ProxConvSync out;
  std::vector<double> diff(n), gain(n), times(n), prev(n), next(n);
  for (std::size_t f = 0; f < kProsodicFeatures; ++f) {
    const auto c = static_cast<Eigen::Index>(cols[f]);
    for (std::size_t i = 0; i < n; ++i) {
      prev[i] = features(static_cast<Eigen::Index>(ex[i].prev_row), c);
      next[i] = features(static_cast<Eigen::Index>(ex[i].next_row), c);
      diff[i] = std::abs(next[i] - prev[i]);
      double base = 0.0;
      for (std::size_t r : draws[i]) base += std::abs(next[i] - features(static_cast<Eigen::Index>(r), c));
      gain[i] = base / static_cast<double>(kBaselineDraws) - diff[i];
      times[i] = ex[i].time_s;
    }
    out.values[f] = stats::mean(gain);
    const auto conv = stats::pearson(diff, times);
    out.values[kProsodicFeatures + f] = conv ? -*conv : 0.0;
    out.flagged[kProsodicFeatures + f] = !conv;
    const auto sync = stats::pearson(prev, next);
    out.values[2 * kProsodicFeatures + f] = sync ? *sync : 0.0;
    out.flagged[2 * kProsodicFeatures + f] = !sync;
  }
  return out;
}

inline ProxConvSync prox_conv_sync(const ConversationRecord& conv, const Eigen::MatrixXd& features,
                                   std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> rows;
  for (const auto& u : conv.utterances) rows[u.speaker_id].push_back(u.source_row);
  auto rng = make_rng(seed, "proximity/" + conv.dyad_id + "/" + std::string(to_string(conv.kind)));
  return prox_conv_sync(exchanges(conv), features, rows, rng);
}

}  // namespace entrain::baselines
