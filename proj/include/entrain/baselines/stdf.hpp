#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "entrain/baselines/prox_conv_sync.hpp"
#include "entrain/error.hpp"
#include "entrain/features/names.hpp"
#include "entrain/stats.hpp"
#include "entrain/types.hpp"

namespace entrain::baselines {

inline constexpr std::size_t kStdfFeatures = 74;
inline constexpr std::size_t kStdfCandidates = 3 * kStdfFeatures;
inline constexpr std::size_t kStdfSelected = 15;
inline constexpr std::size_t kStdfMfccColumns = kStdfFeatures - kPhonationDims - kIntensityDims;

/// The 74 feature columns: phonation, intensity, then the leading 49 MFCC
/// statistic columns (all 39 means and the first 10 standard deviations).
inline const std::vector<std::size_t>& stdf_columns() {
  static const std::vector<std::size_t> cols = [] {
    std::vector<std::size_t> c;
    const auto& ph = feature_block(FeatureSetId::Phonation);
    for (std::size_t i = 0; i < ph.size; ++i) c.push_back(ph.offset + i);
    c.push_back(feature_block(FeatureSetId::Intensity).offset);
    for (std::size_t i = 0; i < kStdfMfccColumns; ++i) c.push_back(feature_block(FeatureSetId::MfccStats).offset + i);
    return c;
  }();
  return cols;
}

inline std::vector<std::string> stdf_candidate_names() {
  std::vector<std::string> out;
  const auto& names = features::feature_names();
  for (std::size_t c : stdf_columns()) {
    for (const char* fn : {"mean", "median", "std"}) out.push_back("stdf_" + names[c] + "_delta_" + fn);
  }
  return out;
}

/// 222 candidates: for each subset feature, mean / median / population std
/// of the absolute adjacent-turn deltas.
inline std::vector<double> stdf_candidates(const ConversationRecord& conv, const Eigen::MatrixXd& features) {
  const auto ex = exchanges(conv);
  std::vector<double> out;
  out.reserve(kStdfCandidates);
  std::vector<double> d(ex.size());
  for (std::size_t c : stdf_columns()) {
    for (std::size_t i = 0; i < ex.size(); ++i) {
      d[i] = std::abs(features(static_cast<Eigen::Index>(ex[i].next_row), static_cast<Eigen::Index>(c)) -
                      features(static_cast<Eigen::Index>(ex[i].prev_row), static_cast<Eigen::Index>(c)));
    }
    out.push_back(stats::mean(d));
    out.push_back(stats::median(d));
    out.push_back(stats::stddev(d));
  }
  return out;
}

struct StdfSelection {
  std::vector<std::size_t> columns;      // kStdfSelected candidate indices
  std::vector<double> abs_correlation;   // 0 for padding columns
  std::size_t padded = 0;                // columns with undefined correlation used as filler
};

/// Top candidates by |Pearson r| with the (0/1) labels of the training rows
/// only. Constant candidates are excluded unless needed to keep the length.
inline StdfSelection select_stdf(const Eigen::MatrixXd& train, const std::vector<int>& labels,
                                 std::size_t count = kStdfSelected) {
  if (static_cast<std::size_t>(train.rows()) != labels.size()) throw ValidationError("stdf: label count mismatch");
  if (static_cast<std::size_t>(train.cols()) < count) throw ValidationError("stdf: too few candidates");
  std::vector<double> y(labels.begin(), labels.end());
  std::vector<std::pair<double, std::size_t>> scored;
  std::vector<std::size_t> undefined;
  std::vector<double> col(static_cast<std::size_t>(train.rows()));
  for (Eigen::Index c = 0; c < train.cols(); ++c) {
    for (Eigen::Index r = 0; r < train.rows(); ++r) col[static_cast<std::size_t>(r)] = train(r, c);
    const auto r = stats::pearson(col, y);
    if (r) {
      scored.emplace_back(std::abs(*r), static_cast<std::size_t>(c));
    } else {
      undefined.push_back(static_cast<std::size_t>(c));
    }
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  StdfSelection sel;
  for (std::size_t i = 0; i < scored.size() && sel.columns.size() < count; ++i) {
    sel.columns.push_back(scored[i].second);
    sel.abs_correlation.push_back(scored[i].first);
  }
  for (std::size_t i = 0; i < undefined.size() && sel.columns.size() < count; ++i) {
    sel.columns.push_back(undefined[i]);
    sel.abs_correlation.push_back(0.0);
    ++sel.padded;
  }
  return sel;
}

}  // namespace entrain::baselines
