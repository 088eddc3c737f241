#pragma once

#include <Eigen/Dense>

#include "entrain/error.hpp"
#include "entrain/types.hpp"

namespace entrain::lda {

/// Count, mean and sum of centred outer products of one class, mergeable
/// with Chan's pairwise update.
struct ClassMoments {
  double n = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd m2;

  explicit ClassMoments(Eigen::Index d = 0) : mean(Eigen::VectorXd::Zero(d)), m2(Eigen::MatrixXd::Zero(d, d)) {}

  void merge(const ClassMoments& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    if (o.mean.size() != mean.size()) throw ValidationError("scatter dimension mismatch");
    const double total = n + o.n;
    const Eigen::VectorXd delta = o.mean - mean;
    m2 += o.m2 + (n * o.n / total) * delta * delta.transpose();
    mean += (o.n / total) * delta;
    n = total;
  }

  /// Adds the rows of `x` as samples.
  void add_rows(const Eigen::MatrixXd& x) {
    if (x.rows() == 0) return;
    ClassMoments batch(x.cols());
    batch.n = static_cast<double>(x.rows());
    batch.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd c = x.rowwise() - batch.mean.transpose();
    batch.m2.noalias() = c.transpose() * c;
    merge(batch);
  }
};

struct ScatterPair {
  Eigen::MatrixXd sw;
  Eigen::MatrixXd sb;
  Eigen::VectorXd mu_real;
  Eigen::VectorXd mu_sham;
  Eigen::VectorXd mu;
  double n_real = 0.0;
  double n_sham = 0.0;
};

class ScatterAccumulator {
 public:
  explicit ScatterAccumulator(Eigen::Index d = 0) : real_(d), sham_(d), d_(d) {}

  Eigen::Index dims() const { return d_; }
  const ClassMoments& real() const { return real_; }
  const ClassMoments& sham() const { return sham_; }

  void add(const Eigen::MatrixXd& rows, ConversationKind kind) {
    if (rows.rows() > 0 && rows.cols() != d_) throw ValidationError("scatter dimension mismatch");
    (kind == ConversationKind::Real ? real_ : sham_).add_rows(rows);
  }

  void merge(const ScatterAccumulator& o) {
    if (o.d_ != d_) throw ValidationError("scatter dimension mismatch");
    real_.merge(o.real_);
    sham_.merge(o.sham_);
  }

  ScatterPair finalize() const {
    if (d_ == 0) throw ValidationError("lda needs at least one feature dimension");
    if (real_.n == 0.0 || sham_.n == 0.0) throw ValidationError("lda needs samples from both classes");
    ScatterPair p;
    p.n_real = real_.n;
    p.n_sham = sham_.n;
    p.mu_real = real_.mean;
    p.mu_sham = sham_.mean;
    p.mu = (real_.n * real_.mean + sham_.n * sham_.mean) / (real_.n + sham_.n);
    p.sw = real_.m2 + sham_.m2;
    const Eigen::VectorXd dr = real_.mean - p.mu;
    const Eigen::VectorXd ds = sham_.mean - p.mu;
    p.sb = real_.n * dr * dr.transpose() + sham_.n * ds * ds.transpose();
    return p;
  }

 private:
  ClassMoments real_;
  ClassMoments sham_;
  Eigen::Index d_;
};

}  // namespace entrain::lda
