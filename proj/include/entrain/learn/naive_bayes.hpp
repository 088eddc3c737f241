#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

#include "entrain/error.hpp"

namespace entrain::learn {

inline void require_binary(const Eigen::MatrixXd& x, const std::vector<int>& y) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw ValidationError("row and label counts differ");
  bool has0 = false, has1 = false;
  for (int v : y) {
    if (v != 0 && v != 1) throw ValidationError("labels must be 0 (low) or 1 (high)");
    (v == 0 ? has0 : has1) = true;
  }
  if (!has0 || !has1) throw ValidationError("training data contains a single class");
}

/// Gaussian naive Bayes. Class 1 is predicted only when its log posterior is
/// strictly larger, so exact ties go to class 0.
class GaussianNaiveBayes {
 public:
  void fit(const Eigen::MatrixXd& x, const std::vector<int>& y) {
    require_binary(x, y);
    const Eigen::Index d = x.cols();
    Eigen::RowVectorXd all_mean = x.colwise().mean();
    const double max_var =
        ((x.rowwise() - all_mean).colwise().squaredNorm() / static_cast<double>(x.rows())).maxCoeff();
    const double floor = max_var > 0.0 ? 1e-9 * max_var : 1e-9;
    for (int c = 0; c < 2; ++c) {
      std::vector<Eigen::Index> rows;
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == c) rows.push_back(static_cast<Eigen::Index>(i));
      }
      const Eigen::MatrixXd xc = x(rows, Eigen::all);
      mean_[c] = xc.colwise().mean();
      var_[c] = ((xc.rowwise() - mean_[c]).colwise().squaredNorm() / static_cast<double>(rows.size()))
                    .cwiseMax(floor);
      log_prior_[c] = std::log(static_cast<double>(rows.size()) / static_cast<double>(y.size()));
    }
    dims_ = d;
  }

  double log_posterior(const Eigen::RowVectorXd& x, int c) const {
    if (x.size() != dims_) throw ValidationError("naive bayes dimension mismatch");
    double lp = log_prior_[c];
    for (Eigen::Index j = 0; j < dims_; ++j) {
      const double v = var_[c][j];
      const double z = x[j] - mean_[c][j];
      lp += -0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5 * z * z / v;
    }
    return lp;
  }

  int predict(const Eigen::RowVectorXd& x) const { return log_posterior(x, 1) > log_posterior(x, 0) ? 1 : 0; }

  const Eigen::RowVectorXd& variance(int c) const { return var_[c]; }

 private:
  Eigen::Index dims_ = 0;
  Eigen::RowVectorXd mean_[2];
  Eigen::RowVectorXd var_[2];
  double log_prior_[2] = {0.0, 0.0};
};

}  // namespace entrain::learn
