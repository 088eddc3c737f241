#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "entrain/learn/loocv.hpp"
#include "learn_oracles.hpp"
#include "svm_dual_oracle.hpp"

namespace entrain::learn {
namespace {

struct Data {
  Eigen::MatrixXd x;
  std::vector<int> y;
  std::vector<std::string> ids;
};

// Class-conditional Gaussians with means -shift/2 and +shift/2 per feature.
Data two_class(int n, int d, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Data out;
  out.x.resize(n, d);
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    out.y.push_back(label);
    out.ids.push_back("r" + std::to_string(i));
    for (int j = 0; j < d; ++j) out.x(i, j) = nd(rng) + (label ? 0.5 : -0.5) * shift;
  }
  return out;
}

TEST(NaiveBayes, LikelihoodDominance) {
  Eigen::MatrixXd x(40, 1);
  std::vector<int> y;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    y.push_back(i % 2);
    x(i, 0) = (i % 2 ? 5.0 : -5.0) + nd(rng);
  }
  GaussianNaiveBayes nb;
  nb.fit(x, y);
  EXPECT_EQ(nb.predict(Eigen::RowVectorXd::Constant(1, 5.0)), 1);
  EXPECT_EQ(nb.predict(Eigen::RowVectorXd::Constant(1, -5.0)), 0);
}

TEST(NaiveBayes, TieGoesLow) {
  Eigen::MatrixXd x(4, 1);
  x << -1, -3, 1, 3;
  GaussianNaiveBayes nb;
  nb.fit(x, {0, 0, 1, 1});
  EXPECT_EQ(nb.log_posterior(Eigen::RowVectorXd::Zero(1), 0), nb.log_posterior(Eigen::RowVectorXd::Zero(1), 1));
  EXPECT_EQ(nb.predict(Eigen::RowVectorXd::Zero(1)), 0);
}

TEST(NaiveBayes, VarianceFloor) {
  Eigen::MatrixXd x(4, 2);
  x << 1, 0, 1, 10, 2, 20, 2, 30;
  GaussianNaiveBayes nb;
  nb.fit(x, {0, 0, 1, 1});
  // column 0 is constant within each class: floored at 1e-9 * the largest column variance
  EXPECT_DOUBLE_EQ(nb.variance(0)[0], 1e-9 * 125.0);
}

TEST(NaiveBayes, SingleClassRejected) {
  GaussianNaiveBayes nb;
  EXPECT_THROW(nb.fit(Eigen::MatrixXd::Ones(3, 2), {1, 1, 1}), ValidationError);
}

TEST(NaiveBayes, SeparableSixteenDimLoocv) {
  const auto d = two_class(50, 16, 2.0, 3);
  EXPECT_GE(loocv(d.x, d.y, d.ids, ClassifierId::NaiveBayes).accuracy, 95.0);
}

TEST(NaiveBayes, AffineRescalingChangesNothing) {
  const auto d = two_class(30, 4, 1.0, 4);
  Eigen::MatrixXd scaled = d.x;
  const Eigen::Vector4d a(2.0, 0.01, 300.0, 7.0), b(-3.0, 5.0, 0.0, 1e3);
  for (int j = 0; j < 4; ++j) scaled.col(j) = scaled.col(j) * a[j] + Eigen::VectorXd::Constant(30, b[j]);
  const auto r1 = loocv(d.x, d.y, d.ids, ClassifierId::NaiveBayes);
  const auto r2 = loocv(scaled, d.y, d.ids, ClassifierId::NaiveBayes);
  for (std::size_t i = 0; i < r1.folds.size(); ++i) EXPECT_EQ(r1.folds[i].predicted, r2.folds[i].predicted);
}

TEST(Logistic, MatchesIrls) {
  const auto d = two_class(60, 3, 1.0, 5);
  LogisticRegression lr;
  lr.fit(d.x, d.y);
  EXPECT_TRUE(lr.converged());
  const auto ref = testing::irls(d.x, d.y, 1e-8);
  EXPECT_LT(std::abs(lr.intercept() - ref[0]), 1e-4);
  EXPECT_LT((lr.coefficients() - ref.tail(3)).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Logistic, SeparableDataFitsPerfectly) {
  Eigen::MatrixXd x(8, 2);
  x << -2, -1, -1.5, -2, -1, -1, -3, 0, 2, 1, 1, 2, 1.5, 1, 3, 0.5;
  const std::vector<int> y{0, 0, 0, 0, 1, 1, 1, 1};
  LogisticRegression lr;
  lr.fit(x, y);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(lr.predict(x.row(i)), y[static_cast<std::size_t>(i)]);
}

TEST(Logistic, SingleClassRejected) {
  LogisticRegression lr;
  EXPECT_THROW(lr.fit(Eigen::MatrixXd::Random(5, 2), {0, 0, 0, 0, 0}), ValidationError);
}

TEST(Logistic, RescalingKeepsConfidentPredictions) {
  const auto d = two_class(40, 3, 1.0, 6);
  Eigen::MatrixXd scaled = d.x * 40.0;
  scaled.col(1).array() += 9.0;
  const Eigen::MatrixXd probe = two_class(20, 3, 1.0, 60).x;
  Eigen::MatrixXd probe_scaled = probe * 40.0;
  probe_scaled.col(1).array() += 9.0;
  const auto st1 = Standardizer::fit(d.x);
  const auto st2 = Standardizer::fit(scaled);
  LogisticRegression a, b;
  a.fit(st1.transform(d.x), d.y);
  b.fit(st2.transform(scaled), d.y);
  const auto p1 = st1.transform(probe), p2 = st2.transform(probe_scaled);
  for (Eigen::Index i = 0; i < probe.rows(); ++i) {
    if (std::abs(a.decision(p1.row(i))) > 1e-3) {
      EXPECT_EQ(a.predict(p1.row(i)), b.predict(p2.row(i)));
    }
  }
}

TEST(Svm, TwoPointTextbook) {
  Eigen::MatrixXd x(2, 1);
  x << -1, 1;
  LinearSvm svm;
  svm.fit(x, {0, 1});
  EXPECT_NEAR(svm.weights()[0], 1.0, 1e-6);
  EXPECT_NEAR(svm.bias(), 0.0, 1e-6);
  EXPECT_NEAR(2.0 / svm.weights().norm(), 2.0, 1e-6);
}

TEST(Svm, SeparableCloudHasZeroHingeLoss) {
  const auto d = two_class(30, 2, 8.0, 7);
  LinearSvm svm;
  svm.fit(d.x, d.y);
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
    const double yi = d.y[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - yi * svm.decision(d.x.row(i)));
  }
  EXPECT_LT(hinge, 1e-2);
}

TEST(Svm, DualObjectiveMatchesQpOracle) {
  for (const auto& c : testing::svm_dual_cases()) {
    const auto n = static_cast<Eigen::Index>(c.y.size());
    Eigen::MatrixXd x(n, c.dims);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int j = 0; j < c.dims; ++j) x(i, j) = c.x[static_cast<std::size_t>(i * c.dims + j)];
    }
    LinearSvm svm;
    svm.fit(x, c.y);
    EXPECT_TRUE(svm.converged());
    EXPECT_LT(std::abs(svm.dual_objective() - c.dual_objective), 1e-4) << n << " points";
    EXPECT_GE(svm.alpha().minCoeff(), 0.0);
    EXPECT_LE(svm.alpha().maxCoeff(), 1.0);
  }
}

TEST(Loocv, FeaturesEqualLabels) {
  Data d;
  d.x.resize(12, 1);
  for (int i = 0; i < 12; ++i) {
    d.y.push_back(i % 3 == 0);
    d.x(i, 0) = d.y.back();
    d.ids.push_back(std::to_string(i));
  }
  for (auto c : kAllClassifiers) EXPECT_EQ(loocv(d.x, d.y, d.ids, c).accuracy, 100.0) << to_string(c);
}

TEST(Loocv, ShuffledLabelsStayNearChance) {
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto d = two_class(50, 4, 0.0, 100 + seed);
    std::mt19937_64 rng(seed);
    std::shuffle(d.y.begin(), d.y.end(), rng);
    const double acc = loocv(d.x, d.y, d.ids, ClassifierId::NaiveBayes).accuracy;
    inside += acc >= 30.0 && acc <= 70.0;
  }
  EXPECT_GE(inside, 38);  // 95% of seeds
}

TEST(Loocv, RowOrderInvariant) {
  const auto d = two_class(24, 3, 1.0, 8);
  const double base = loocv(d.x, d.y, d.ids, ClassifierId::Logistic).accuracy;
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    std::vector<Eigen::Index> perm(24);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> y;
    std::vector<std::string> ids;
    for (auto p : perm) {
      y.push_back(d.y[static_cast<std::size_t>(p)]);
      ids.push_back(d.ids[static_cast<std::size_t>(p)]);
    }
    EXPECT_EQ(loocv(Eigen::MatrixXd(d.x(perm, Eigen::all)), y, ids, ClassifierId::Logistic).accuracy, base);
  }
}

TEST(Loocv, SingleClassTrainingFoldSkipped) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 2);
  const std::vector<int> y{0, 0, 0, 0, 1};
  const auto r = loocv(x, y, {"a", "b", "c", "d", "e"}, ClassifierId::NaiveBayes);
  EXPECT_EQ(r.skipped_folds, 1);
  EXPECT_TRUE(r.folds[4].skipped);
  EXPECT_FALSE(r.folds[4].correct());
  EXPECT_EQ(r.confusion.false_low, 1);
}

TEST(Loocv, HeldOutRowNeverFitted) {
  const auto d = two_class(10, 2, 1.0, 10);
  const auto r = loocv(d.x, d.y, d.ids, ClassifierId::Svm);
  for (const auto& f : r.folds) {
    EXPECT_EQ(std::count(f.fitted_rows.begin(), f.fitted_rows.end(), f.row), 0);
    EXPECT_EQ(f.fitted_rows.size(), 9u);
  }
  const auto j = to_json(r);
  EXPECT_EQ(j["folds"].size(), 10u);
  EXPECT_EQ(j["classifier"], "svm");
}

TEST(Loocv, NeedsFourRows) {
  EXPECT_THROW(loocv(Eigen::MatrixXd::Zero(3, 1), {0, 1, 0}, {"a", "b", "c"}, ClassifierId::NaiveBayes),
               ValidationError);
}

}  // namespace
}  // namespace entrain::learn
