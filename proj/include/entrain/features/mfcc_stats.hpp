#pragma once

#include <Eigen/Dense>

#include <array>
#include <string_view>
#include <vector>

#include "entrain/error.hpp"
#include "entrain/stats.hpp"
#include "entrain/types.hpp"

namespace entrain::features {

inline constexpr std::size_t kMfccFrameDims = 39;
inline constexpr std::array<std::string_view, 6> kMfccStatNames{"mean", "std", "range",
                                                                "skew", "kurt", "mad"};

struct MfccStats {
  std::vector<double> values;   // stat-major: 39 means, then 39 stds, ...
  std::vector<bool> degenerate;  // per frame dimension: zero variance
};

inline MfccStats mfcc_statistics(const Eigen::MatrixXd& frames) {
  if (frames.cols() != static_cast<Eigen::Index>(kMfccFrameDims)) {
    throw ValidationError("mfcc statistics expect 39 columns");
  }
  if (frames.rows() < 3) throw ValidationError("mfcc statistics need at least 3 frames");
  MfccStats out;
  out.values.assign(kMfccStatsDims, 0.0);
  out.degenerate.assign(kMfccFrameDims, false);
  std::vector<double> col(static_cast<std::size_t>(frames.rows()));
  for (std::size_t d = 0; d < kMfccFrameDims; ++d) {
    for (Eigen::Index t = 0; t < frames.rows(); ++t) {
      col[static_cast<std::size_t>(t)] = frames(t, static_cast<Eigen::Index>(d));
    }
    const double var = stats::variance(col);
    out.degenerate[d] = stats::is_degenerate(col, var);
    out.values[0 * kMfccFrameDims + d] = stats::mean(col);
    out.values[1 * kMfccFrameDims + d] = std::sqrt(var);
    out.values[2 * kMfccFrameDims + d] = stats::range(col);
    out.values[3 * kMfccFrameDims + d] = stats::skewness(col);
    out.values[4 * kMfccFrameDims + d] = stats::kurtosis(col);
    out.values[5 * kMfccFrameDims + d] = stats::mean_abs_deviation(col);
  }
  return out;
}

}  // namespace entrain::features
