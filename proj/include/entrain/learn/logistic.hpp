#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "entrain/learn/naive_bayes.hpp"

namespace entrain::learn {

struct LogisticOptions {
  double ridge = 1e-8;
  double gradient_tolerance = 1e-8;
  int max_iterations = 10000;
};

/// L2-penalized logistic regression (intercept unpenalized) fitted by damped
/// Newton steps. Objective: sum of log losses + ridge/2 * |w|^2.
class LogisticRegression {
 public:
  explicit LogisticRegression(LogisticOptions opts = {}) : opts_(opts) {}

  void fit(const Eigen::MatrixXd& x, const std::vector<int>& y) {
    require_binary(x, y);
    const Eigen::Index n = x.rows(), d = x.cols();
    Eigen::MatrixXd a(n, d + 1);
    a.col(0).setOnes();
    a.rightCols(d) = x;
    Eigen::VectorXd t(n);
    for (Eigen::Index i = 0; i < n; ++i) t[i] = y[static_cast<std::size_t>(i)];
    Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, opts_.ridge);
    penalty[0] = 0.0;
    theta_ = Eigen::VectorXd::Zero(d + 1);
    auto objective = [&](const Eigen::VectorXd& th) {
      const Eigen::VectorXd z = a * th;
      double f = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        // log(1 + e^z) - t z, evaluated stably
        f += (z[i] > 0 ? z[i] + std::log1p(std::exp(-z[i])) : std::log1p(std::exp(z[i]))) - t[i] * z[i];
      }
      return f + 0.5 * (penalty.array() * th.array().square()).sum();
    };
    converged_ = false;
    double f = objective(theta_);
    for (iterations_ = 0; iterations_ < opts_.max_iterations; ++iterations_) {
      const Eigen::VectorXd p = (a * theta_).unaryExpr([](double z) { return sigmoid(z); });
      const Eigen::VectorXd g = a.transpose() * (p - t) + penalty.cwiseProduct(theta_);
      if (g.cwiseAbs().maxCoeff() < opts_.gradient_tolerance) {
        converged_ = true;
        break;
      }
      const Eigen::VectorXd s = p.cwiseProduct(Eigen::VectorXd::Ones(n) - p);
      Eigen::MatrixXd h = a.transpose() * s.asDiagonal() * a;
      h.diagonal() += penalty;
      h.diagonal().array() += 1e-12 * std::max(1.0, h.diagonal().maxCoeff());
      const Eigen::VectorXd step = h.ldlt().solve(g);
      double scale = 1.0;
      bool moved = false;
      for (int k = 0; k < 60; ++k, scale *= 0.5) {
        const Eigen::VectorXd cand = theta_ - scale * step;
        const double fc = objective(cand);
        if (fc <= f - 1e-4 * scale * g.dot(step)) {
          theta_ = cand;
          f = fc;
          moved = true;
          break;
        }
      }
      if (!moved) break;  // no decrease representable at this precision
    }
  }

  static double sigmoid(double z) {
    return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  }

  double decision(const Eigen::RowVectorXd& x) const { return theta_[0] + x.dot(theta_.tail(theta_.size() - 1)); }
  double probability(const Eigen::RowVectorXd& x) const { return sigmoid(decision(x)); }
  int predict(const Eigen::RowVectorXd& x) const { return probability(x) > 0.5 ? 1 : 0; }

  double intercept() const { return theta_[0]; }
  Eigen::VectorXd coefficients() const { return theta_.tail(theta_.size() - 1); }
  bool converged() const { return converged_; }
  int iterations() const { return iterations_; }

 private:
  LogisticOptions opts_;
  Eigen::VectorXd theta_;
  bool converged_ = false;
  int iterations_ = 0;
};

}  // namespace entrain::learn
