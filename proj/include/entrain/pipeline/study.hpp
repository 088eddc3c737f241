#pragma once

#include <Eigen/Dense>

#include <array>
#include <exception>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "entrain/baselines/pca_similarity.hpp"
#include "entrain/baselines/prox_conv_sync.hpp"
#include "entrain/baselines/stdf.hpp"
#include "entrain/features/extract.hpp"
#include "entrain/lda/fit.hpp"
#include "entrain/lda/scatter.hpp"
#include "entrain/lda/turn_differences.hpp"
#include "entrain/learn/loocv.hpp"
#include "entrain/pipeline/config.hpp"
#include "entrain/pipeline/synthetic.hpp"
#include "entrain/sham/sham_builder.hpp"

namespace entrain::pipeline {

/// A conversation ready for analysis: utterances plus their feature rows.
struct DyadInput {
  std::string dyad_id;
  SuccessLabel label = SuccessLabel::Excluded;
  ConversationRecord real;
  Eigen::MatrixXd features;  // row r belongs to the utterance with source_row r
};

struct Exclusion {
  std::string dyad_id;
  std::string stage;
  std::string reason;
};

struct StudyOptions {
  std::uint64_t seed = 1;
  lda::FitMode fit_mode = lda::FitMode::PerFold;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::vector<learn::ClassifierId> classifiers{learn::kAllClassifiers.begin(), learn::kAllClassifiers.end()};
  std::size_t workers = 1;
  lda::LdaOptions lda;

  bool runs(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }
};

using LdaSet = std::array<lda::LdaProjection, kLdaFeatureSets.size()>;
using EntrainmentVector = std::array<double, lda::kEntrainmentDims>;

struct DyadAnalysis {
  std::size_t input = 0;
  std::array<ConversationRecord, sham::kShamsPerDyad> shams;
  std::array<Eigen::MatrixXd, kLdaFeatureSets.size()> real_differences;
  std::array<lda::ScatterAccumulator, kLdaFeatureSets.size()> scatter;
  std::optional<baselines::ProxConvSync> pcs;
  std::optional<baselines::PcaSimilarity> pca;
  std::vector<double> stdf;
};

struct FoldLda {
  std::string held_out;
  LdaSet projections;
};

struct StdfFold {
  std::string held_out;
  baselines::StdfSelection selection;
};

/// {min, max, mean, std} of the projected real-conversation turn scalars,
/// per LDA feature set.
inline EntrainmentVector entrainment_vector(const DyadAnalysis& d, const LdaSet& p) {
  EntrainmentVector v{};
  for (std::size_t s = 0; s < kLdaFeatureSets.size(); ++s) {
    const Eigen::VectorXd x = lda::project(d.real_differences[s], p[s]);
    const auto a = lda::aggregate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    std::copy(a.begin(), a.end(), v.begin() + static_cast<std::ptrdiff_t>(4 * s));
  }
  return v;
}

/// In-memory analysis of a set of conversations. Stages run on demand and
/// in dependency order. A conversation that fails a stage is excluded from
/// every later one and recorded.
class Study {
 public:
  Study(std::vector<DyadInput> inputs, StudyOptions opts) : inputs_(std::move(inputs)), opts_(std::move(opts)) {
    for (std::size_t i = 0; i < inputs_.size(); ++i) alive_.push_back(i);
    analyses_.resize(inputs_.size());
  }

  const StudyOptions& options() const { return opts_; }
  const std::vector<DyadInput>& inputs() const { return inputs_; }
  const std::vector<Exclusion>& exclusions() const { return exclusions_; }

  /// Indices of conversations that survived every stage run so far.
  const std::vector<std::size_t>& included() const { return alive_; }
  const DyadAnalysis& analysis(std::size_t input) const { return analyses_[input]; }

  void build_shams() {
    if (shams_done_) return;
    per_dyad("sham", [&](std::size_t i) {
      auto real = inputs_[i].real;
      real.dyad_id = inputs_[i].dyad_id;
      analyses_[i].input = i;
      analyses_[i].shams = sham::build_shams(real, opts_.seed);
    });
    shams_done_ = true;
  }

  void build_turn_differences() {
    if (differences_done_) return;
    build_shams();
    per_dyad("entrain", [&](std::size_t i) {
      auto& a = analyses_[i];
      const auto& f = inputs_[i].features;
      for (std::size_t s = 0; s < kLdaFeatureSets.size(); ++s) {
        const auto set = kLdaFeatureSets[s];
        a.real_differences[s] = lda::turn_difference_matrix(inputs_[i].real, f, set);
        if (a.real_differences[s].rows() < 2) throw ValidationError("fewer than 2 speaker changes");
        a.scatter[s] = lda::ScatterAccumulator(static_cast<Eigen::Index>(feature_block(set).size));
        a.scatter[s].add(a.real_differences[s], ConversationKind::Real);
        for (const auto& sham : a.shams) a.scatter[s].add(lda::turn_difference_matrix(sham, f, set), ConversationKind::Sham);
      }
    });
    differences_done_ = true;
  }

  void build_baselines() {
    if (baselines_done_) return;
    build_shams();
    per_dyad("baselines", [&](std::size_t i) {
      auto& a = analyses_[i];
      const auto& in = inputs_[i];
      auto real = in.real;
      real.dyad_id = in.dyad_id;
      if (opts_.runs(Method::Pcs)) a.pcs = baselines::prox_conv_sync(real, in.features, opts_.seed);
      if (opts_.runs(Method::Pca)) a.pca = baselines::pca_similarity(real, in.features);
      if (opts_.runs(Method::Stdf)) a.stdf = baselines::stdf_candidates(real, in.features);
    });
    baselines_done_ = true;
  }

  /// Model fit on every included conversation (real and sham).
  const LdaSet& global_lda() {
    if (!global_) {
      rows();
      global_ = fit_excluding(std::nullopt, lda::FitMode::Global);
    }
    return *global_;
  }

  /// Rows that take part in classification: included and labelled.
  const std::vector<std::size_t>& rows() {
    if (!rows_) {
      build_turn_differences();
      if (needs_baselines()) build_baselines();
      std::vector<std::size_t> r;
      for (auto i : alive_) {
        if (inputs_[i].label != SuccessLabel::Excluded) r.push_back(i);
      }
      if (r.size() < 4) {
        std::string why = std::to_string(r.size()) + " labelled conversation(s) left, at least 4 are needed";
        if (!exclusions_.empty()) why += " (first exclusion: " + exclusions_.front().dyad_id + ", " + exclusions_.front().reason + ")";
        throw ValidationError(why);
      }
      rows_ = std::move(r);
    }
    return *rows_;
  }

  std::vector<std::string> row_ids() {
    std::vector<std::string> ids;
    for (auto i : rows()) ids.push_back(inputs_[i].dyad_id);
    return ids;
  }

  std::vector<int> row_labels() {
    std::vector<int> y;
    for (auto i : rows()) y.push_back(inputs_[i].label == SuccessLabel::High ? 1 : 0);
    return y;
  }

  /// Per-fold models, one per classification row, fit without that row's
  /// conversation. Empty in global mode.
  const std::vector<FoldLda>& fold_lda() {
    if (!folds_) {
      folds_.emplace();
      if (opts_.fit_mode == lda::FitMode::PerFold) {
        const auto& r = rows();
        folds_->resize(r.size());
        features::parallel_for(r.size(), opts_.workers, [&](std::size_t t) {
          (*folds_)[t] = FoldLda{inputs_[r[t]].dyad_id, fit_excluding(r[t], lda::FitMode::PerFold)};
        });
      }
    }
    return *folds_;
  }

  /// Entrainment vectors of all classification rows as seen by fold `t`
  /// (or by the global model).
  Eigen::MatrixXd lda_matrix(const LdaSet& p) {
    const auto& r = rows();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(lda::kEntrainmentDims));
    for (std::size_t k = 0; k < r.size(); ++k) {
      const auto v = entrainment_vector(analyses_[r[k]], p);
      for (std::size_t j = 0; j < v.size(); ++j) x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = v[j];
    }
    return x;
  }

  /// Vector reported for each included conversation: the held-out fold's
  /// model for classification rows in per-fold mode, the global model
  /// otherwise. The flag says which.
  std::vector<std::pair<EntrainmentVector, bool>> reported_entrainment() {
    const auto& glob = global_lda();
    const auto& folds = fold_lda();
    const auto& r = rows();
    std::vector<std::pair<EntrainmentVector, bool>> out;
    for (auto i : alive_) {
      const auto it = std::find(r.begin(), r.end(), i);
      if (!folds.empty() && it != r.end()) {
        out.emplace_back(entrainment_vector(analyses_[i], folds[static_cast<std::size_t>(it - r.begin())].projections),
                         true);
      } else {
        out.emplace_back(entrainment_vector(analyses_[i], glob), false);
      }
    }
    return out;
  }

  const std::vector<StdfFold>& stdf_folds() {
    if (!stdf_folds_) {
      stdf_folds_.emplace();
      const auto& r = rows();
      const Eigen::MatrixXd x = baseline_matrix(Method::Stdf);
      const auto y = row_labels();
      for (std::size_t t = 0; t < r.size(); ++t) {
        std::vector<Eigen::Index> train;
        std::vector<int> yt;
        for (std::size_t k = 0; k < r.size(); ++k) {
          if (k == t) continue;
          train.push_back(static_cast<Eigen::Index>(k));
          yt.push_back(y[k]);
        }
        stdf_folds_->push_back({inputs_[r[t]].dyad_id, baselines::select_stdf(x(train, Eigen::all), yt)});
      }
    }
    return *stdf_folds_;
  }

  /// Conversation-level matrix of a baseline method over the classification rows.
  Eigen::MatrixXd baseline_matrix(Method m) {
    const auto& r = rows();
    std::vector<std::vector<double>> vals;
    if (m == Method::Lda || !baselines_done_ || !opts_.runs(m)) {
      throw ValidationError("baseline '" + std::string(to_string(m)) + "' was not computed");
    }
    for (auto i : r) {
      const auto& a = analyses_[i];
      if (m == Method::Pcs) vals.emplace_back(a.pcs->values.begin(), a.pcs->values.end());
      if (m == Method::Pca) vals.emplace_back(a.pca->values.begin(), a.pca->values.end());
      if (m == Method::Stdf) vals.push_back(a.stdf);
    }
    const Eigen::Index cols = vals.empty() ? 0 : static_cast<Eigen::Index>(vals.front().size());
    Eigen::MatrixXd x(static_cast<Eigen::Index>(vals.size()), cols);
    for (std::size_t k = 0; k < vals.size(); ++k) {
      for (Eigen::Index j = 0; j < cols; ++j) x(static_cast<Eigen::Index>(k), j) = vals[k][static_cast<std::size_t>(j)];
    }
    return x;
  }

  learn::CvReport cross_validate(Method m, learn::ClassifierId c) {
    const auto ids = row_ids();
    const auto y = row_labels();
    const std::size_t n = y.size();
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    auto labels_of = [&](const std::vector<std::size_t>& train) {
      std::vector<int> out;
      for (auto k : train) out.push_back(y[k]);
      return out;
    };
    auto predict = [&](const Eigen::MatrixXd& x, std::size_t test, const std::vector<std::size_t>& train) {
      std::vector<Eigen::Index> idx(train.begin(), train.end());
      return learn::fit_predict(c, x(idx, Eigen::all), labels_of(train), x.row(static_cast<Eigen::Index>(test)));
    };
    learn::FoldFunction fold;
    Eigen::MatrixXd fixed;
    std::vector<Eigen::MatrixXd> per_fold;
    if (m == Method::Lda) {
      if (opts_.fit_mode == lda::FitMode::PerFold) {
        for (const auto& f : fold_lda()) per_fold.push_back(lda_matrix(f.projections));
        fold = [&](std::size_t test, const std::vector<std::size_t>& train) {
          const auto p = predict(per_fold[test], test, train);
          return learn::FoldOutcome{p.labels.front(), p.converged, train};
        };
      } else {
        fixed = lda_matrix(global_lda());
        // The global projection saw every conversation, the held-out one included.
        fold = [&](std::size_t test, const std::vector<std::size_t>& train) {
          const auto p = predict(fixed, test, train);
          return learn::FoldOutcome{p.labels.front(), p.converged, all};
        };
      }
    } else if (m == Method::Stdf) {
      fixed = baseline_matrix(m);
      const auto& sel = stdf_folds();
      fold = [&](std::size_t test, const std::vector<std::size_t>& train) {
        std::vector<Eigen::Index> cols(sel[test].selection.columns.begin(), sel[test].selection.columns.end());
        const Eigen::MatrixXd x = fixed(Eigen::all, cols);
        const auto p = predict(x, test, train);
        return learn::FoldOutcome{p.labels.front(), p.converged, train};
      };
    } else {
      fixed = baseline_matrix(m);
      fold = [&](std::size_t test, const std::vector<std::size_t>& train) {
        const auto p = predict(fixed, test, train);
        return learn::FoldOutcome{p.labels.front(), p.converged, train};
      };
    }
    return learn::loocv(ids, y, fold, std::string(to_string(m)), std::string(learn::to_string(c)));
  }

  /// Every requested method x classifier, methods major.
  std::vector<learn::CvReport> classify() {
    std::vector<learn::CvReport> out;
    for (auto m : opts_.methods) {
      for (auto c : opts_.classifiers) out.push_back(cross_validate(m, c));
    }
    return out;
  }

 private:
  bool needs_baselines() const {
    return opts_.runs(Method::Pcs) || opts_.runs(Method::Pca) || opts_.runs(Method::Stdf);
  }

  template <typename Fn>
  void per_dyad(const std::string& stage, Fn&& fn) {
    std::vector<std::string> errors(inputs_.size());
    features::parallel_for(alive_.size(), opts_.workers, [&](std::size_t k) {
      const std::size_t i = alive_[k];
      try {
        fn(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        if (errors[i].empty()) errors[i] = "unknown error";
      }
    });
    std::vector<std::size_t> keep;
    for (auto i : alive_) {
      if (errors[i].empty()) {
        keep.push_back(i);
      } else {
        exclusions_.push_back({inputs_[i].dyad_id, stage, errors[i]});
      }
    }
    alive_ = std::move(keep);
  }

  LdaSet fit_excluding(std::optional<std::size_t> skip, lda::FitMode mode) const {
    LdaSet out;
    for (std::size_t s = 0; s < kLdaFeatureSets.size(); ++s) {
      lda::ScatterAccumulator acc(static_cast<Eigen::Index>(feature_block(kLdaFeatureSets[s]).size));
      for (auto i : alive_) {
        if (skip && *skip == i) continue;
        acc.merge(analyses_[i].scatter[s]);
      }
      out[s] = lda::fit_lda(acc, kLdaFeatureSets[s], opts_.lda, mode);
    }
    return out;
  }

  std::vector<DyadInput> inputs_;
  StudyOptions opts_;
  std::vector<std::size_t> alive_;
  std::vector<DyadAnalysis> analyses_;
  std::vector<Exclusion> exclusions_;
  bool shams_done_ = false;
  bool differences_done_ = false;
  bool baselines_done_ = false;
  std::optional<LdaSet> global_;
  std::optional<std::vector<std::size_t>> rows_;
  std::optional<std::vector<FoldLda>> folds_;
  std::optional<std::vector<StdfFold>> stdf_folds_;
};

/// Adapts the feature-level synthetic corpus.
inline std::vector<DyadInput> to_inputs(const std::vector<SyntheticConversation>& convs) {
  std::vector<DyadInput> out;
  for (const auto& c : convs) out.push_back({c.record.dyad_id, c.label, c.record, c.features});
  return out;
}

}  // namespace entrain::pipeline
