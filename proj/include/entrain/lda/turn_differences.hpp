#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "entrain/error.hpp"
#include "entrain/types.hpp"

namespace entrain::lda {

struct TurnDifference {
  Eigen::VectorXd x;
  ConversationKind y = ConversationKind::Real;
  std::string dyad_id;
  std::size_t turn_index = 0;
};

/// Positions i (in midpoint order) where utterance i starts a new speaker's
/// turn, so (i - 1, i) straddles the change.
inline std::vector<std::size_t> speaker_changes(const ConversationRecord& conv) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < conv.utterances.size(); ++i) {
    if (conv.utterances[i].speaker_id != conv.utterances[i - 1].speaker_id) out.push_back(i);
  }
  if (out.empty()) throw ValidationError("conversation '" + conv.dyad_id + "' has no speaker change");
  return out;
}

/// One row per speaker change: |f(last of outgoing turn) - f(first of incoming
/// turn)| over the columns [offset, offset + size). `features` is indexed by
/// utterance `source_row`.
inline Eigen::MatrixXd turn_difference_matrix(const ConversationRecord& conv, const Eigen::MatrixXd& features,
                                              std::size_t offset, std::size_t size) {
  if (offset + size > static_cast<std::size_t>(features.cols())) {
    throw ValidationError("feature columns out of range");
  }
  const auto changes = speaker_changes(conv);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(changes.size()), static_cast<Eigen::Index>(size));
  const auto off = static_cast<Eigen::Index>(offset);
  const auto d = static_cast<Eigen::Index>(size);
  for (std::size_t k = 0; k < changes.size(); ++k) {
    const auto prev = static_cast<Eigen::Index>(conv.utterances[changes[k] - 1].source_row);
    const auto next = static_cast<Eigen::Index>(conv.utterances[changes[k]].source_row);
    if (prev >= features.rows() || next >= features.rows()) {
      throw ValidationError("utterance source_row outside the feature matrix");
    }
    out.row(static_cast<Eigen::Index>(k)) =
        (features.row(prev).segment(off, d) - features.row(next).segment(off, d)).cwiseAbs();
  }
  return out;
}

inline Eigen::MatrixXd turn_difference_matrix(const ConversationRecord& conv, const Eigen::MatrixXd& features,
                                              FeatureSetId set) {
  const auto& b = feature_block(set);
  return turn_difference_matrix(conv, features, b.offset, b.size);
}

inline std::vector<TurnDifference> turn_differences(const ConversationRecord& conv,
                                                    const Eigen::MatrixXd& features, FeatureSetId set) {
  const auto m = turn_difference_matrix(conv, features, set);
  std::vector<TurnDifference> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out.push_back({m.row(i).transpose(), conv.kind, conv.dyad_id, static_cast<std::size_t>(i)});
  }
  return out;
}

}  // namespace entrain::lda
