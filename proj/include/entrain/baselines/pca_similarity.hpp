#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "entrain/error.hpp"
#include "entrain/types.hpp"

namespace entrain::baselines {

inline constexpr double kPcaVariance = 0.90;
inline constexpr std::size_t kMinHalfUtterances = 5;
inline constexpr std::array<FeatureSetId, 4> kPcaFeatureSets{FeatureSetId::Ems, FeatureSetId::MfccStats,
                                                             FeatureSetId::Ltas, FeatureSetId::Phonation};

struct PrincipalBasis {
  Eigen::MatrixXd vectors;  // d x rank, leading first
  Eigen::VectorXd variances;
  std::size_t components_for_variance = 0;
};

/// Principal axes of the rows of `x` (centred internally). Directions with
/// variance below 1e-10 of the largest are treated as absent.
inline PrincipalBasis principal_basis(const Eigen::MatrixXd& x, double keep = kPcaVariance) {
  PrincipalBasis out;
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > 1e-5 * s[0]) ++rank;
  out.vectors = svd.matrixV().leftCols(rank);
  out.variances = s.head(rank).array().square();
  const double total = out.variances.sum();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rank; ++i) {
    acc += out.variances[i];
    ++out.components_for_variance;
    if (acc >= keep * total) break;
  }
  return out;
}

/// ||Ua' Ub||_F^2 / k: mean squared cosine of the principal angles between
/// two subspaces given by orthonormal columns.
inline double subspace_similarity(const Eigen::MatrixXd& ua, const Eigen::MatrixXd& ub) {
  const auto k = std::max(ua.cols(), ub.cols());
  if (k == 0) return 0.0;
  return (ua.transpose() * ub).squaredNorm() / static_cast<double>(k);
}

struct PcaSimilarity {
  std::array<double, 8> values{};      // per set (EMS, MFCC, LTAS, phonation): first half, second half
  std::array<double, 4> half_mean{};   // per set mean over the halves
  std::array<bool, 8> rank_reduced{};  // k had to shrink below the 90% count
};

inline std::vector<std::string> pca_similarity_names() {
  std::vector<std::string> out;
  for (auto set : kPcaFeatureSets) {
    for (const char* h : {"half1", "half2"}) out.push_back("pca_" + std::string(to_string(set)) + "_" + h);
  }
  return out;
}

inline std::vector<std::string> pca_similarity_mean_names() {
  std::vector<std::string> out;
  for (auto set : kPcaFeatureSets) out.push_back("pca_" + std::string(to_string(set)) + "_mean");
  return out;
}

/// Symmetric PCA similarity between the two speakers in each half of the
/// conversation. Columns are z-scored over the whole conversation first.
inline PcaSimilarity pca_similarity(const ConversationRecord& conv, const Eigen::MatrixXd& features) {
  const auto speakers = conv.speakers();
  const std::size_t n = conv.utterances.size();
  std::vector<Eigen::Index> rows;
  for (const auto& u : conv.utterances) rows.push_back(static_cast<Eigen::Index>(u.source_row));
  PcaSimilarity out;
  for (std::size_t s = 0; s < kPcaFeatureSets.size(); ++s) {
    const auto& blk = feature_block(kPcaFeatureSets[s]);
    Eigen::MatrixXd z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(blk.size));
    for (std::size_t i = 0; i < n; ++i) {
      z.row(static_cast<Eigen::Index>(i)) =
          features.row(rows[i]).segment(static_cast<Eigen::Index>(blk.offset), static_cast<Eigen::Index>(blk.size));
    }
    const Eigen::RowVectorXd mu = z.colwise().mean();
    z.rowwise() -= mu;
    const Eigen::RowVectorXd sd = (z.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt();
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
      if (sd[c] > 1e-12 * std::max(1.0, std::abs(mu[c]))) {
        z.col(c) /= sd[c];
      } else {
        z.col(c).setZero();
      }
    }
    for (std::size_t h = 0; h < 2; ++h) {
      const std::size_t lo = h == 0 ? 0 : n / 2;
      const std::size_t hi = h == 0 ? n / 2 : n;
      std::array<std::vector<Eigen::Index>, 2> idx;
      for (std::size_t i = lo; i < hi; ++i) idx[conv.utterances[i].speaker_id == speakers[0] ? 0 : 1].push_back(
          static_cast<Eigen::Index>(i));
      if (idx[0].size() < kMinHalfUtterances || idx[1].size() < kMinHalfUtterances) {
        throw ValidationError("pca similarity needs at least 5 utterances per speaker in each half");
      }
      std::array<PrincipalBasis, 2> basis;
      for (std::size_t sp = 0; sp < 2; ++sp) basis[sp] = principal_basis(z(idx[sp], Eigen::all));
      const std::size_t k = std::max(basis[0].components_for_variance, basis[1].components_for_variance);
      const auto ka = std::min<Eigen::Index>(static_cast<Eigen::Index>(k), basis[0].vectors.cols());
      const auto kb = std::min<Eigen::Index>(static_cast<Eigen::Index>(k), basis[1].vectors.cols());
      out.rank_reduced[2 * s + h] = ka < static_cast<Eigen::Index>(k) || kb < static_cast<Eigen::Index>(k);
      out.values[2 * s + h] = subspace_similarity(basis[0].vectors.leftCols(ka), basis[1].vectors.leftCols(kb));
    }
    out.half_mean[s] = 0.5 * (out.values[2 * s] + out.values[2 * s + 1]);
  }
  return out;
}

}  // namespace entrain::baselines
