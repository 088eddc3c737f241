#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "entrain/learn/naive_bayes.hpp"

namespace entrain::learn {

struct SvmOptions {
  double c = 1.0;
  double tolerance = 1e-3;
  int max_iterations = 1000000;
};

/// Soft-margin linear SVM trained by SMO on the dual
///   min 1/2 a'Qa - sum(a),  0 <= a <= C,  y'a = 0,  Q_ij = y_i y_j <x_i, x_j>
/// with maximal-violating-pair working set selection.
class LinearSvm {
 public:
  explicit LinearSvm(SvmOptions opts = {}) : opts_(opts) {}

  void fit(const Eigen::MatrixXd& x, const std::vector<int>& labels) {
    require_binary(x, labels);
    const Eigen::Index n = x.rows();
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
    const Eigen::MatrixXd k = x * x.transpose();
    const Eigen::MatrixXd q = (y * y.transpose()).cwiseProduct(k);
    alpha_ = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd grad = -Eigen::VectorXd::Ones(n);  // Q a - e
    const double c = opts_.c;
    auto in_up = [&](Eigen::Index t) {
      return (y[t] > 0 && alpha_[t] < c) || (y[t] < 0 && alpha_[t] > 0);
    };
    auto in_low = [&](Eigen::Index t) {
      return (y[t] > 0 && alpha_[t] > 0) || (y[t] < 0 && alpha_[t] < c);
    };
    converged_ = false;
    for (iterations_ = 0; iterations_ < opts_.max_iterations; ++iterations_) {
      Eigen::Index i = -1, j = -1;
      double gmax = -std::numeric_limits<double>::infinity();
      double gmin = std::numeric_limits<double>::infinity();
      for (Eigen::Index t = 0; t < n; ++t) {
        const double v = -y[t] * grad[t];
        if (in_up(t) && v > gmax) {
          gmax = v;
          i = t;
        }
        if (in_low(t) && v < gmin) {
          gmin = v;
          j = t;
        }
      }
      if (i < 0 || j < 0 || gmax - gmin < opts_.tolerance) {
        converged_ = true;
        break;
      }
      // analytic two-variable update along y_i d_i + y_j d_j = 0
      const double eta = std::max(q(i, i) + q(j, j) - 2.0 * y[i] * y[j] * q(i, j), 1e-12);
      const double old_i = alpha_[i], old_j = alpha_[j];
      double step = (gmax - gmin) / eta;  // move of y_i a_i (and -y_j a_j)
      // box limits for a_i += y_i step, a_j -= y_j step
      const double room_i = y[i] > 0 ? c - old_i : old_i;
      const double room_j = y[j] > 0 ? old_j : c - old_j;
      step = std::min({step, room_i, room_j});
      alpha_[i] = old_i + y[i] * step;
      alpha_[j] = old_j - y[j] * step;
      alpha_[i] = std::clamp(alpha_[i], 0.0, c);
      alpha_[j] = std::clamp(alpha_[j], 0.0, c);
      const double di = alpha_[i] - old_i, dj = alpha_[j] - old_j;
      grad += q.col(i) * di + q.col(j) * dj;
    }
    w_ = x.transpose() * alpha_.cwiseProduct(y);
    // bias: average over free vectors, else the middle of the feasible interval
    double sum = 0.0;
    int free = 0;
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double yg = y[t] * grad[t];
      if (alpha_[t] > 0.0 && alpha_[t] < c) {
        sum += yg;
        ++free;
      } else if ((alpha_[t] >= c) == (y[t] < 0)) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    }
    double rho = 0.0;
    if (free > 0) {
      rho = sum / free;
    } else if (std::isfinite(ub) && std::isfinite(lb)) {
      rho = 0.5 * (ub + lb);
    } else if (std::isfinite(ub)) {
      rho = ub;
    } else if (std::isfinite(lb)) {
      rho = lb;
    }
    b_ = -rho;
    dual_objective_ = 0.5 * alpha_.dot(q * alpha_) - alpha_.sum();
  }

  double decision(const Eigen::RowVectorXd& x) const { return x.dot(w_) + b_; }
  int predict(const Eigen::RowVectorXd& x) const { return decision(x) > 0.0 ? 1 : 0; }

  const Eigen::VectorXd& weights() const { return w_; }
  double bias() const { return b_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  /// Value of the minimized dual objective at the solution.
  double dual_objective() const { return dual_objective_; }
  bool converged() const { return converged_; }
  int iterations() const { return iterations_; }

 private:
  SvmOptions opts_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd w_;
  double b_ = 0.0;
  double dual_objective_ = 0.0;
  bool converged_ = false;
  int iterations_ = 0;
};

}  // namespace entrain::learn
