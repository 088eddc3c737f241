#pragma once

#include <Eigen/Dense>

#include "entrain/error.hpp"

namespace entrain::learn {

/// Per-column z-scoring with statistics from the rows it was fitted on.
/// Constant columns are only centred.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& x) {
    if (x.rows() == 0) throw ValidationError("standardizer needs at least one row");
    Standardizer s;
    s.mean = x.colwise().mean();
    const Eigen::MatrixXd c = x.rowwise() - s.mean;
    s.scale = (c.colwise().squaredNorm() / static_cast<double>(x.rows())).cwiseSqrt();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
      if (!(s.scale[j] > 1e-12 * std::max(1.0, std::abs(s.mean[j])))) s.scale[j] = 1.0;
    }
    return s;
  }

  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const {
    if (x.cols() != mean.size()) throw ValidationError("standardizer column mismatch");
    return (x.rowwise() - mean).array().rowwise() / scale.array();
  }
};

}  // namespace entrain::learn
