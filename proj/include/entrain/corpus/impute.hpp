#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "entrain/error.hpp"

namespace entrain::corpus {

/// Replaces non-finite entries with the median of the finite entries of the
/// same column (one conversation per matrix).
inline Eigen::MatrixXd impute_missing(Eigen::MatrixXd features) {
  std::vector<double> present;
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    present.clear();
    bool any_missing = false;
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
      const double v = features(r, c);
      if (std::isfinite(v)) {
        present.push_back(v);
      } else {
        any_missing = true;
      }
    }
    if (!any_missing) continue;
    if (present.empty()) {
      throw ValidationError("feature column " + std::to_string(c) + " has no observed values");
    }
    std::sort(present.begin(), present.end());
    const std::size_t m = present.size();
    const double med = m % 2 ? present[m / 2] : 0.5 * (present[m / 2 - 1] + present[m / 2]);
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
      if (!std::isfinite(features(r, c))) features(r, c) = med;
    }
  }
  return features;
}

}  // namespace entrain::corpus
