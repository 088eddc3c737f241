#include <gtest/gtest.h>

#include <random>

#include "entrain/lda/fit.hpp"
#include "entrain/lda/turn_differences.hpp"

namespace entrain::lda {
namespace {

ConversationRecord conversation(const std::vector<std::string>& speakers) {
  ConversationRecord r;
  r.dyad_id = "c";
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    r.utterances.push_back({speakers[i], 1.0 * i, 1.0 * i + 0.8, i});
  }
  return r;
}

Eigen::MatrixXd gaussian(Eigen::Index n, const Eigen::VectorXd& mean, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, sigma);
  Eigen::MatrixXd x(n, mean.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < mean.size(); ++j) x(i, j) = mean[j] + nd(rng);
  }
  return x;
}

// Direct evaluation of the within/between scatter sums, sample by sample.
struct NaiveScatter {
  Eigen::MatrixXd sw, sb;
  Eigen::VectorXd mu_real, mu_sham;
};

NaiveScatter naive_scatter(const Eigen::MatrixXd& real, const Eigen::MatrixXd& sham) {
  NaiveScatter s;
  s.mu_real = real.colwise().sum().transpose() / static_cast<double>(real.rows());
  s.mu_sham = sham.colwise().sum().transpose() / static_cast<double>(sham.rows());
  const Eigen::Index d = real.cols();
  s.sw = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < real.rows(); ++i) {
    const Eigen::VectorXd c = real.row(i).transpose() - s.mu_real;
    s.sw += c * c.transpose();
  }
  for (Eigen::Index i = 0; i < sham.rows(); ++i) {
    const Eigen::VectorXd c = sham.row(i).transpose() - s.mu_sham;
    s.sw += c * c.transpose();
  }
  const double nr = static_cast<double>(real.rows()), ns = static_cast<double>(sham.rows());
  const Eigen::VectorXd mu = (real.colwise().sum() + sham.colwise().sum()).transpose() / (nr + ns);
  s.sb = nr * (s.mu_real - mu) * (s.mu_real - mu).transpose() + ns * (s.mu_sham - mu) * (s.mu_sham - mu).transpose();
  return s;
}

ScatterAccumulator accumulate(const Eigen::MatrixXd& real, const Eigen::MatrixXd& sham) {
  ScatterAccumulator acc(real.cols());
  acc.add(real, ConversationKind::Real);
  acc.add(sham, ConversationKind::Sham);
  return acc;
}

TEST(TurnDifferences, ArithmeticExample) {
  auto conv = conversation({"A", "B"});
  Eigen::MatrixXd f(2, 2);
  f << 1, 3, 4, 1;
  const auto m = turn_difference_matrix(conv, f, 0, 2);
  ASSERT_EQ(m.rows(), 1);
  EXPECT_EQ(m(0, 0), 3.0);
  EXPECT_EQ(m(0, 1), 2.0);
}

TEST(TurnDifferences, OnePerSpeakerChange) {
  const auto conv = conversation({"A", "B", "A", "B"});
  const Eigen::MatrixXd f = Eigen::MatrixXd::Random(4, kFeatureDims);
  EXPECT_EQ(turn_differences(conv, f, FeatureSetId::Ems).size(), 3u);
  const Eigen::MatrixXd same = Eigen::MatrixXd::Ones(4, kFeatureDims);
  EXPECT_TRUE(turn_difference_matrix(conv, same, FeatureSetId::Ltas).isZero(0.0));
}

TEST(TurnDifferences, UsesTurnBoundaryUtterances) {
  // A A | B B B | A : changes at rows (1,2) and (4,5)
  const auto conv = conversation({"A", "A", "B", "B", "B", "A"});
  Eigen::MatrixXd f(6, 1);
  f << 0, 10, 13, 50, 70, 100;
  const auto m = turn_difference_matrix(conv, f, 0, 1);
  ASSERT_EQ(m.rows(), 2);
  EXPECT_EQ(m(0, 0), 3.0);
  EXPECT_EQ(m(1, 0), 30.0);
}

TEST(TurnDifferences, FollowsSourceRows) {
  auto conv = conversation({"A", "B"});
  conv.utterances[0].source_row = 2;
  conv.utterances[1].source_row = 0;
  Eigen::MatrixXd f(3, 1);
  f << 5, 100, 1;
  EXPECT_EQ(turn_difference_matrix(conv, f, 0, 1)(0, 0), 4.0);
}

TEST(TurnDifferences, SingleSpeakerRejected) {
  EXPECT_THROW(turn_difference_matrix(conversation({"A", "A"}), Eigen::MatrixXd::Zero(2, 3), 0, 3),
               ValidationError);
}

TEST(TurnDifferences, NonNegativeProperty) {
  std::mt19937_64 rng(2);
  std::bernoulli_distribution coin(0.5);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::string> who{"A", "B"};
    for (int i = 0; i < 20; ++i) who.push_back(coin(rng) ? "A" : "B");
    const auto conv = conversation(who);
    const Eigen::MatrixXd f = Eigen::MatrixXd::Random(22, 7) * 100.0;
    const auto m = turn_difference_matrix(conv, f, 0, 7);
    EXPECT_GE(m.minCoeff(), 0.0);
    EXPECT_EQ(static_cast<std::size_t>(m.rows()), speaker_changes(conv).size());
  }
}

TEST(Scatter, BatchesAndMergesMatchDirectSums) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd real = gaussian(37, Eigen::VectorXd::Constant(4, 1.0), 2.0, rng);
  const Eigen::MatrixXd sham = gaussian(53, Eigen::VectorXd::Constant(4, 3.0), 1.0, rng);
  const auto oracle = naive_scatter(real, sham);

  // split into uneven chunks accumulated separately, then merged in two orders
  ScatterAccumulator a(4), b(4), c(4);
  a.add(real.topRows(5), ConversationKind::Real);
  b.add(real.bottomRows(32), ConversationKind::Real);
  b.add(sham.topRows(40), ConversationKind::Sham);
  c.add(sham.bottomRows(13), ConversationKind::Sham);
  ScatterAccumulator ab = a;
  ab.merge(b);
  ab.merge(c);
  ScatterAccumulator cb = c;
  cb.merge(b);
  cb.merge(a);
  for (const auto& acc : {ab, cb}) {
    const auto s = acc.finalize();
    EXPECT_LT((s.sw - oracle.sw).norm(), 1e-10 * oracle.sw.norm());
    EXPECT_LT((s.sb - oracle.sb).norm(), 1e-10 * oracle.sb.norm());
    EXPECT_LT((s.mu_real - oracle.mu_real).norm(), 1e-12);
    EXPECT_TRUE(s.sw.isApprox(s.sw.transpose()));
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.sw).eigenvalues().minCoeff(), -1e-9);
    EXPECT_EQ(s.n_real, 37.0);
    EXPECT_EQ(s.n_sham, 53.0);
  }
}

TEST(Scatter, BetweenClassRankOne) {
  std::mt19937_64 rng(6);
  const auto s = accumulate(gaussian(30, Eigen::VectorXd::Zero(5), 1.0, rng),
                            gaussian(30, Eigen::VectorXd::Ones(5), 1.0, rng)).finalize();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.sb);
  const auto v = eig.eigenvalues();
  EXPECT_LT(v.head(4).cwiseAbs().maxCoeff(), 1e-10 * v[4]);
}

TEST(Scatter, BothClassesRequired) {
  ScatterAccumulator acc(2);
  acc.add(Eigen::MatrixXd::Ones(3, 2), ConversationKind::Real);
  EXPECT_THROW(acc.finalize(), ValidationError);
  EXPECT_THROW(ScatterAccumulator(0).finalize(), ValidationError);
}

TEST(Fit, SeparatedCloudsAlongFirstAxis) {
  std::mt19937_64 rng(7);
  Eigen::Vector2d m0(0, 0), m1(10, 0);
  const auto p = fit_lda(accumulate(gaussian(200, m0, 1.0, rng), gaussian(200, m1, 1.0, rng)), FeatureSetId::Ems);
  EXPECT_GT(std::abs(p.w[0]), 0.999);
  EXPECT_NEAR(p.w.norm(), 1.0, 1e-12);
  EXPECT_GT(p.w[0], 0.0);  // sham mean at x = 10 projects higher
}

TEST(Fit, MatchesClosedFormAndEigenproblem) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd m0 = Eigen::VectorXd::Zero(5), m1(5);
    m1 << 0.3, -0.2, 0.5, 0.1, 0.0;
    const Eigen::MatrixXd real = gaussian(60, m0, 1.0, rng);
    Eigen::MatrixXd sham = gaussian(80, m1, 1.0, rng);
    sham.col(2) *= 3.0;
    const auto s = naive_scatter(real, sham);
    const auto p = fit_lda(accumulate(real, sham), FeatureSetId::Phonation);
    const double eps = 1e-6 * s.sw.trace() / 5.0;
    EXPECT_NEAR(p.epsilon, eps, 1e-12 * eps);
    const Eigen::MatrixXd swr = s.sw + eps * Eigen::MatrixXd::Identity(5, 5);
    const Eigen::VectorXd closed = swr.colPivHouseholderQr().solve(s.mu_sham - s.mu_real).normalized();
    EXPECT_GE(std::abs(closed.dot(p.w)), 1.0 - 1e-9);
    const Eigen::VectorXd lhs = s.sb * p.w;
    EXPECT_LT((lhs - p.eigenvalue * swr * p.w).norm() / lhs.norm(), 1e-8);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(s.sb, swr);
    EXPECT_NEAR(p.eigenvalue, ges.eigenvalues()[4], 1e-8 * ges.eigenvalues()[4]);
    EXPECT_NEAR(p.eigenvalue, rayleigh(s.sb, swr, p.w), 1e-12);
    EXPECT_GE(p.eigenvalue, 0.0);
  }
}

TEST(Fit, PermutationNullDrivesEigenvalueToZero) {
  std::mt19937_64 rng(9);
  const Eigen::VectorXd m = Eigen::VectorXd::Constant(6, 2.0);
  const auto p = fit_lda(accumulate(gaussian(5000, m, 1.0, rng), gaussian(5000, m, 1.0, rng)), FeatureSetId::Ltas);
  EXPECT_LT(p.eigenvalue, 0.05);
}

TEST(Fit, HighDimensionalInputIsWhitenedFirst) {
  std::mt19937_64 rng(10);
  Eigen::VectorXd m0 = Eigen::VectorXd::Zero(60), m1 = Eigen::VectorXd::Zero(60);
  m1.head(3).setConstant(2.0);
  const Eigen::MatrixXd real = gaussian(100, m0, 1.0, rng);
  const Eigen::MatrixXd sham = gaussian(100, m1, 1.0, rng);
  const auto p = fit_lda(accumulate(real, sham), FeatureSetId::MfccStats);
  ASSERT_TRUE(p.pca_basis.has_value());
  EXPECT_LT(p.pca_basis->cols(), 60);
  EXPECT_NEAR(p.w.norm(), 1.0, 1e-12);
  EXPECT_GT(project(sham, p).mean(), project(real, p).mean());
  EXPECT_GT(p.w.head(3).norm(), 0.5);
}

TEST(Fit, SmallDimensionSkipsWhitening) {
  std::mt19937_64 rng(11);
  const auto p = fit_lda(accumulate(gaussian(50, Eigen::VectorXd::Zero(3), 1.0, rng),
                                    gaussian(50, Eigen::VectorXd::Ones(3), 1.0, rng)),
                         FeatureSetId::Ems);
  EXPECT_FALSE(p.pca_basis.has_value());
}

TEST(Fit, ConstantWithinClassUsesUnitRidge) {
  Eigen::MatrixXd real = Eigen::MatrixXd::Zero(20, 2);
  Eigen::MatrixXd sham = Eigen::MatrixXd::Ones(20, 2);
  const auto p = fit_lda(accumulate(real, sham), FeatureSetId::Ems);
  EXPECT_EQ(p.epsilon, 1e-6);
  EXPECT_NEAR(p.w[0], std::sqrt(0.5), 1e-12);
}

TEST(Project, OrientationAndZero) {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd real = gaussian(80, Eigen::VectorXd::Constant(4, 1.0), 1.0, rng);
  const Eigen::MatrixXd sham = gaussian(80, Eigen::VectorXd::Constant(4, 1.5), 1.0, rng);
  const auto acc = accumulate(real, sham);
  const auto p = fit_lda(acc, FeatureSetId::Phonation);
  EXPECT_EQ(project(Eigen::MatrixXd::Zero(1, 4), p)[0], 0.0);
  EXPECT_LT(p.w.dot(p.mu_real), p.w.dot(p.mu_sham));
  // Rayleigh quotient of the projected training data equals the fitted value
  const Eigen::VectorXd pr = project(real, p), ps = project(sham, p);
  const double mr = pr.mean(), ms = ps.mean(), mu = (pr.sum() + ps.sum()) / 160.0;
  const double between = 80.0 * (mr - mu) * (mr - mu) + 80.0 * (ms - mu) * (ms - mu);
  const double within = (pr.array() - mr).square().sum() + (ps.array() - ms).square().sum() + p.epsilon;
  EXPECT_NEAR(between / within, p.eigenvalue, 1e-9 * p.eigenvalue);
  EXPECT_THROW(project(Eigen::MatrixXd::Zero(1, 3), p), ValidationError);
}

TEST(Project, ScalingPreservesOrdering) {
  std::mt19937_64 rng(13);
  const Eigen::MatrixXd real = gaussian(60, Eigen::VectorXd::Constant(3, 1.0), 0.5, rng);
  const Eigen::MatrixXd sham = gaussian(60, Eigen::VectorXd::Constant(3, 1.4), 0.5, rng);
  const Eigen::MatrixXd probe = gaussian(10, Eigen::VectorXd::Constant(3, 1.2), 0.5, rng);
  const auto a = project(probe, fit_lda(accumulate(real, sham), FeatureSetId::Ems));
  const auto b = project(probe * 7.5, fit_lda(accumulate(real * 7.5, sham * 7.5), FeatureSetId::Ems));
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index j = 0; j < 10; ++j) EXPECT_EQ(a[i] < a[j], b[i] < b[j]);
  }
}

TEST(Aggregate, Examples) {
  const std::vector<double> flat{2, 2, 2};
  EXPECT_EQ(aggregate(flat), (std::array<double, 4>{2, 2, 2, 0}));
  const std::vector<double> two{1, 3};
  EXPECT_EQ(aggregate(two), (std::array<double, 4>{1, 3, 2, 1}));
  EXPECT_THROW(aggregate(std::vector<double>{}), ValidationError);
  EXPECT_EQ(entrainment_names().size(), kEntrainmentDims);
  EXPECT_EQ(entrainment_names().front(), "lda_mfcc_min");
  EXPECT_EQ(entrainment_names().back(), "lda_phonation_std");
}

TEST(Aggregate, OrderedProperty) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> nd(0.0, 3.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(2 + t % 17);
    for (auto& x : v) x = nd(rng);
    const auto a = aggregate(v);
    EXPECT_LE(a[0], a[2]);
    EXPECT_LE(a[2], a[1]);
    EXPECT_GE(a[3], 0.0);
  }
}

TEST(Model, JsonRoundTrip) {
  std::mt19937_64 rng(15);
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(40);
  m1[0] = 1.0;
  const auto p = fit_lda(accumulate(gaussian(60, Eigen::VectorXd::Zero(40), 1.0, rng), gaussian(60, m1, 1.0, rng)),
                         FeatureSetId::Ltas, {}, FitMode::Global);
  const auto j = to_json(p);
  EXPECT_EQ(j["fit_mode"], "global");
  const auto back = lda_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.w, p.w);
  EXPECT_EQ(back.eigenvalue, p.eigenvalue);
  EXPECT_EQ(back.feature_set, FeatureSetId::Ltas);
  ASSERT_TRUE(back.pca_basis.has_value());
  EXPECT_EQ(*back.pca_basis, *p.pca_basis);
  EXPECT_THROW(lda_from_json(nlohmann::json::parse(R"({"w":[1]})")), FormatError);
}

}  // namespace
}  // namespace entrain::lda
