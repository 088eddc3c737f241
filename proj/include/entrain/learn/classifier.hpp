#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

#include "entrain/error.hpp"
#include "entrain/learn/logistic.hpp"
#include "entrain/learn/naive_bayes.hpp"
#include "entrain/learn/standardize.hpp"
#include "entrain/learn/svm.hpp"

namespace entrain::learn {

enum class ClassifierId { NaiveBayes, Logistic, Svm };

inline constexpr std::array<ClassifierId, 3> kAllClassifiers{ClassifierId::Logistic, ClassifierId::Svm,
                                                             ClassifierId::NaiveBayes};

inline std::string_view to_string(ClassifierId c) {
  switch (c) {
    case ClassifierId::NaiveBayes: return "nb";
    case ClassifierId::Logistic: return "logistic";
    case ClassifierId::Svm: return "svm";
  }
  return "nb";
}

inline std::string_view display_name(ClassifierId c) {
  switch (c) {
    case ClassifierId::NaiveBayes: return "Naive Bayes";
    case ClassifierId::Logistic: return "Logistic";
    case ClassifierId::Svm: return "SVM";
  }
  return "";
}

inline ClassifierId parse_classifier(std::string_view s) {
  for (auto c : kAllClassifiers) {
    if (to_string(c) == s) return c;
  }
  throw ValidationError("unknown classifier '" + std::string(s) + "' (expected nb, logistic or svm)");
}

struct Prediction {
  std::vector<int> labels;
  bool converged = true;
};

/// Fits on `train` and labels each row of `test`. Logistic regression and the
/// SVM see features z-scored with the training rows' statistics.
inline Prediction fit_predict(ClassifierId id, const Eigen::MatrixXd& train, const std::vector<int>& y,
                              const Eigen::MatrixXd& test) {
  Prediction out;
  auto each_row = [&](const auto& model, const Eigen::MatrixXd& x) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) out.labels.push_back(model.predict(x.row(i)));
  };
  switch (id) {
    case ClassifierId::NaiveBayes: {
      GaussianNaiveBayes nb;
      nb.fit(train, y);
      each_row(nb, test);
      break;
    }
    case ClassifierId::Logistic: {
      const auto st = Standardizer::fit(train);
      LogisticRegression lr;
      lr.fit(st.transform(train), y);
      each_row(lr, st.transform(test));
      out.converged = lr.converged();
      break;
    }
    case ClassifierId::Svm: {
      const auto st = Standardizer::fit(train);
      LinearSvm svm;
      svm.fit(st.transform(train), y);
      each_row(svm, st.transform(test));
      out.converged = svm.converged();
      break;
    }
  }
  return out;
}

}  // namespace entrain::learn
