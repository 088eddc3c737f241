#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "entrain/error.hpp"
#include "entrain/learn/classifier.hpp"

namespace entrain::learn {

/// What a fold function reports for one held-out row.
struct FoldOutcome {
  int predicted = 0;
  bool converged = true;
  std::vector<std::size_t> fitted_rows;  // rows whose data or labels the fold touched
};

struct FoldRecord {
  std::size_t row = 0;
  std::string dyad_id;
  int truth = 0;
  std::optional<int> predicted;
  bool skipped = false;    // training rows held a single class
  bool converged = true;
  std::vector<std::size_t> fitted_rows;

  bool correct() const { return predicted && *predicted == truth; }
};

struct Confusion {
  int true_high = 0;   // truth high, predicted high
  int false_low = 0;   // truth high, predicted low or skipped
  int true_low = 0;
  int false_high = 0;  // truth low, predicted high or skipped
};

struct CvReport {
  std::string method;
  std::string classifier;
  double accuracy = 0.0;  // percent
  std::vector<FoldRecord> folds;
  Confusion confusion;
  int skipped_folds = 0;
  int unconverged_folds = 0;
};

using FoldFunction = std::function<FoldOutcome(std::size_t test_row, const std::vector<std::size_t>& train_rows)>;

/// Leave-one-out over rows with labels in {0, 1}. A fold whose training rows
/// share one label is skipped, flagged and counted as wrong.
inline CvReport loocv(const std::vector<std::string>& ids, const std::vector<int>& labels, const FoldFunction& fold,
                      std::string method = {}, std::string classifier = {}) {
  const std::size_t n = labels.size();
  if (ids.size() != n) throw ValidationError("loocv: id and label counts differ");
  if (n < 4) throw ValidationError("loocv needs at least 4 rows");
  CvReport rep;
  rep.method = std::move(method);
  rep.classifier = std::move(classifier);
  int correct = 0;
  for (std::size_t t = 0; t < n; ++t) {
    FoldRecord rec;
    rec.row = t;
    rec.dyad_id = ids[t];
    rec.truth = labels[t];
    std::vector<std::size_t> train;
    int highs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == t) continue;
      train.push_back(i);
      highs += labels[i];
    }
    if (highs == 0 || highs == static_cast<int>(train.size())) {
      rec.skipped = true;
      ++rep.skipped_folds;
    } else {
      auto out = fold(t, train);
      rec.predicted = out.predicted;
      rec.converged = out.converged;
      rec.fitted_rows = std::move(out.fitted_rows);
      if (!rec.converged) ++rep.unconverged_folds;
    }
    if (rec.correct()) ++correct;
    const bool said_high = rec.predicted && *rec.predicted == 1;
    if (rec.truth == 1) {
      (said_high ? rep.confusion.true_high : rep.confusion.false_low)++;
    } else {
      (rec.predicted && !said_high ? rep.confusion.true_low : rep.confusion.false_high)++;
    }
    rep.folds.push_back(std::move(rec));
  }
  rep.accuracy = 100.0 * correct / static_cast<double>(n);
  return rep;
}

/// LOOCV of a fixed feature matrix with one classifier.
inline CvReport loocv(const Eigen::MatrixXd& x, const std::vector<int>& labels, const std::vector<std::string>& ids,
                      ClassifierId id, std::string method = {}) {
  if (static_cast<std::size_t>(x.rows()) != labels.size()) throw ValidationError("loocv: row and label counts differ");
  auto fold = [&](std::size_t test, const std::vector<std::size_t>& train) {
    std::vector<Eigen::Index> rows(train.begin(), train.end());
    std::vector<int> y;
    for (auto r : train) y.push_back(labels[r]);
    const auto pred = fit_predict(id, x(rows, Eigen::all), y, x.row(static_cast<Eigen::Index>(test)));
    return FoldOutcome{pred.labels.front(), pred.converged, train};
  };
  return loocv(ids, labels, fold, std::move(method), std::string(to_string(id)));
}

inline nlohmann::json to_json(const CvReport& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"dyad_id", f.dyad_id},
                     {"truth", f.truth == 1 ? "high" : "low"},
                     {"predicted", f.predicted ? nlohmann::json(*f.predicted == 1 ? "high" : "low") : nlohmann::json()},
                     {"skipped", f.skipped},
                     {"converged", f.converged}});
  }
  return {{"method", r.method},
          {"classifier", r.classifier},
          {"accuracy", r.accuracy},
          {"folds", folds},
          {"confusion",
           {{"true_high", r.confusion.true_high},
            {"false_low", r.confusion.false_low},
            {"true_low", r.confusion.true_low},
            {"false_high", r.confusion.false_high}}},
          {"skipped_folds", r.skipped_folds},
          {"unconverged_folds", r.unconverged_folds}};
}

}  // namespace entrain::learn
