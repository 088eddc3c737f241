#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entrain/error.hpp"
#include "entrain/lda/scatter.hpp"
#include "entrain/stats.hpp"
#include "entrain/types.hpp"

namespace entrain::lda {

enum class FitMode { PerFold, Global };

inline std::string_view to_string(FitMode m) { return m == FitMode::PerFold ? "per-fold" : "global"; }

inline FitMode parse_fit_mode(std::string_view s) {
  if (s == "per-fold") return FitMode::PerFold;
  if (s == "global") return FitMode::Global;
  throw ValidationError("unknown fit mode '" + std::string(s) + "' (expected per-fold or global)");
}

struct LdaOptions {
  double ridge_scale = 1e-6;
  double pca_ratio = 5.0;         // whiten when d > n / pca_ratio
  double pca_variance = 0.95;
};

struct LdaProjection {
  FeatureSetId feature_set = FeatureSetId::MfccStats;
  Eigen::VectorXd w;
  double eigenvalue = 0.0;
  Eigen::VectorXd mu_real;
  Eigen::VectorXd mu_sham;
  double epsilon = 0.0;
  FitMode fit_mode = FitMode::PerFold;
  std::optional<Eigen::MatrixXd> pca_basis;  // d x k whitening map
  bool degenerate = false;                   // class means coincide

  Eigen::Index dims() const { return w.size(); }
};

inline double ridge_epsilon(const Eigen::MatrixXd& sw, double scale) {
  const double tr = sw.trace();
  return tr > 0.0 ? scale * tr / static_cast<double>(sw.rows()) : scale;
}

namespace detail {

// Rank-one between-class scatter makes the top generalized eigenvector
// (Sw + eps I)^-1 (mu_sham - mu_real); this returns it unnormalized.
inline Eigen::VectorXd two_class_direction(const Eigen::MatrixXd& sw_reg, const Eigen::VectorXd& delta) {
  Eigen::LLT<Eigen::MatrixXd> llt(sw_reg);
  if (llt.info() == Eigen::Success) return llt.solve(delta);
  return sw_reg.ldlt().solve(delta);
}

inline Eigen::MatrixXd whitening_basis(const Eigen::MatrixXd& total_scatter, double keep) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(total_scatter);
  if (eig.info() != Eigen::Success) throw NumericError("pca eigendecomposition failed");
  const Eigen::VectorXd vals = eig.eigenvalues();
  const Eigen::Index d = vals.size();
  double total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) total += std::max(vals[i], 0.0);
  if (!(total > 0.0)) throw NumericError("pca of constant data");
  const double floor = 1e-12 * vals[d - 1];
  std::vector<Eigen::Index> kept;
  double acc = 0.0;
  for (Eigen::Index i = d - 1; i >= 0 && vals[i] > floor; --i) {
    kept.push_back(i);
    acc += vals[i];
    if (acc >= keep * total) break;
  }
  Eigen::MatrixXd basis(d, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    basis.col(static_cast<Eigen::Index>(j)) = eig.eigenvectors().col(kept[j]) / std::sqrt(vals[kept[j]]);
  }
  return basis;
}

}  // namespace detail

/// Rayleigh quotient w'Sb w / w'Sw w.
inline double rayleigh(const Eigen::MatrixXd& sb, const Eigen::MatrixXd& sw, const Eigen::VectorXd& w) {
  const double den = w.dot(sw * w);
  return den > 0.0 ? w.dot(sb * w) / den : 0.0;
}

/// Fisher discriminant for real vs sham turn differences, unit norm and
/// oriented so the sham mean projects higher.
inline LdaProjection fit_lda(const ScatterPair& s, FeatureSetId set, const LdaOptions& opts = {},
                             FitMode mode = FitMode::PerFold) {
  const Eigen::Index d = s.sw.rows();
  if (d == 0) throw ValidationError("lda needs at least one feature dimension");
  if (s.n_real == 0.0 || s.n_sham == 0.0) throw ValidationError("lda needs samples from both classes");
  LdaProjection p;
  p.feature_set = set;
  p.fit_mode = mode;
  p.mu_real = s.mu_real;
  p.mu_sham = s.mu_sham;
  const Eigen::VectorXd delta = s.mu_sham - s.mu_real;
  const double n = s.n_real + s.n_sham;

  Eigen::VectorXd w;
  if (static_cast<double>(d) > n / opts.pca_ratio) {
    const Eigen::MatrixXd basis = detail::whitening_basis(s.sw + s.sb, opts.pca_variance);
    const Eigen::MatrixXd sw_k = basis.transpose() * s.sw * basis;
    p.epsilon = ridge_epsilon(sw_k, opts.ridge_scale);
    const Eigen::MatrixXd reg = sw_k + p.epsilon * Eigen::MatrixXd::Identity(sw_k.rows(), sw_k.cols());
    w = basis * detail::two_class_direction(reg, basis.transpose() * delta);
    p.pca_basis = basis;
  } else {
    p.epsilon = ridge_epsilon(s.sw, opts.ridge_scale);
    const Eigen::MatrixXd reg = s.sw + p.epsilon * Eigen::MatrixXd::Identity(d, d);
    w = detail::two_class_direction(reg, delta);
  }
  const double norm = w.norm();
  if (!std::isfinite(norm)) throw NumericError("lda direction is not finite");
  if (norm == 0.0) {
    p.degenerate = true;
    w = Eigen::VectorXd::Unit(d, 0);
  } else {
    w /= norm;
  }
  if (w.dot(delta) < 0.0) w = -w;
  p.w = w;
  const Eigen::MatrixXd sw_reg =
      p.pca_basis ? s.sw : Eigen::MatrixXd(s.sw + p.epsilon * Eigen::MatrixXd::Identity(d, d));
  p.eigenvalue = std::max(0.0, rayleigh(s.sb, sw_reg, w));
  return p;
}

inline LdaProjection fit_lda(const ScatterAccumulator& acc, FeatureSetId set, const LdaOptions& opts = {},
                             FitMode mode = FitMode::PerFold) {
  return fit_lda(acc.finalize(), set, opts, mode);
}

/// w'x for each row of `x`.
inline Eigen::VectorXd project(const Eigen::MatrixXd& x, const LdaProjection& p) {
  if (x.cols() != p.dims()) throw ValidationError("projection dimension mismatch");
  return x * p.w;
}

inline constexpr std::array<std::string_view, 4> kAggregateStats{"min", "max", "mean", "std"};

/// {min, max, mean, population std} of one feature set's turn scalars.
inline std::array<double, 4> aggregate(std::span<const double> scalars) {
  if (scalars.empty()) throw ValidationError("aggregate of an empty scalar list");
  return {stats::min(scalars), stats::max(scalars), stats::mean(scalars), stats::stddev(scalars)};
}

inline constexpr std::size_t kEntrainmentDims = 16;

/// Column names of the entrainment vector, feature-set major.
inline std::vector<std::string> entrainment_names() {
  std::vector<std::string> out;
  for (auto set : kLdaFeatureSets) {
    for (auto s : kAggregateStats) out.push_back("lda_" + std::string(to_string(set)) + "_" + std::string(s));
  }
  return out;
}

inline nlohmann::json to_json(const LdaProjection& p) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json j{{"feature_set", to_string(p.feature_set)},
                   {"w", vec(p.w)},
                   {"eigenvalue", p.eigenvalue},
                   {"class_means", {{"real", vec(p.mu_real)}, {"sham", vec(p.mu_sham)}}},
                   {"epsilon", p.epsilon},
                   {"fit_mode", to_string(p.fit_mode)},
                   {"degenerate", p.degenerate}};
  if (p.pca_basis) {
    std::vector<std::vector<double>> cols;
    for (Eigen::Index c = 0; c < p.pca_basis->cols(); ++c) cols.push_back(vec(p.pca_basis->col(c)));
    j["pca_basis"] = cols;
  } else {
    j["pca_basis"] = nullptr;
  }
  return j;
}

inline LdaProjection lda_from_json(const nlohmann::json& j) {
  auto vec = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  try {
    LdaProjection p;
    p.feature_set = parse_feature_set(j.at("feature_set").get<std::string>());
    p.w = vec(j.at("w"));
    p.eigenvalue = j.at("eigenvalue").get<double>();
    p.mu_real = vec(j.at("class_means").at("real"));
    p.mu_sham = vec(j.at("class_means").at("sham"));
    p.epsilon = j.at("epsilon").get<double>();
    p.fit_mode = parse_fit_mode(j.at("fit_mode").get<std::string>());
    p.degenerate = j.value("degenerate", false);
    if (j.contains("pca_basis") && !j["pca_basis"].is_null()) {
      const auto& cols = j["pca_basis"];
      Eigen::MatrixXd b(p.w.size(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) b.col(static_cast<Eigen::Index>(c)) = vec(cols[c]);
      p.pca_basis = b;
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("lda model: ") + e.what());
  }
}

}  // namespace entrain::lda
