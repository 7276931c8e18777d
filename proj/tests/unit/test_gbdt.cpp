#include <gtest/gtest.h>

#include <cmath>

#include "asag/error.hpp"
#include "asag/gbdt.hpp"
#include "asag/rng.hpp"
#include "support/oracles.hpp"

using namespace asag;
using namespace asag::gbdt;

namespace {

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = i;
  return r;
}

std::vector<std::vector<double>> rows_of(const Matrix& X) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[static_cast<std::size_t>(i)].assign(X.row(i).begin(), X.row(i).end());
  return out;
}

double accuracy(const Matrix& p, const Labels& y) {
  int ok = 0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) ok += (p(i, 1) >= p(i, 0)) == (y[static_cast<std::size_t>(i)] == 1);
  return static_cast<double>(ok) / static_cast<double>(y.size());
}

}  // namespace

TEST(SplitGain, Formula) {
  EXPECT_DOUBLE_EQ(split_gain(-2, 1, 2, 1, 1), 0.5 * (4.0 / 2 + 4.0 / 2 - 0.0));
  EXPECT_DOUBLE_EQ(split_gain(1, 1, 1, 1, 0), 0.0);
}

TEST(BestSplit, ConstantFeatureHasNoSplit) {
  Matrix X = Matrix::Constant(5, 1, 3.0);
  std::vector<double> g{1, -1, 1, -1, 1}, h(5, 0.25);
  EXPECT_FALSE(best_split(iota(5), X, g, h, 1.0).has_value());
}

TEST(BestSplit, SingleRowHasNoSplit) {
  Matrix X(1, 1);
  X << 1;
  std::vector<double> g{1}, h{1};
  EXPECT_FALSE(best_split(iota(1), X, g, h, 1.0).has_value());
}

TEST(BestSplit, ThresholdIsMidpoint) {
  Matrix X(4, 1);
  X << 1, 2, 3, 4;
  std::vector<double> g{-1, -1, 1, 1}, h(4, 1.0);
  const auto s = best_split(iota(4), X, g, h, 1.0);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->feature, 0);
  EXPECT_DOUBLE_EQ(s->threshold, 2.5);
  EXPECT_NEAR(s->gain, 0.5 * (4.0 / 3 + 4.0 / 3), 1e-12);
}

TEST(BestSplit, TiesGoToLowerFeature) {
  Matrix X(4, 2);
  X << 1, 1, 2, 2, 3, 3, 4, 4;
  std::vector<double> g{-1, -1, 1, 1}, h(4, 1.0);
  EXPECT_EQ(best_split(iota(4), X, g, h, 1.0)->feature, 0);
}

TEST(BestSplit, AgreesWithExhaustiveOracle) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<Eigen::Index>(2 + rng.below(30));
    const auto d = static_cast<Eigen::Index>(1 + rng.below(4));
    Matrix X(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < d; ++j) X(i, j) = static_cast<double>(rng.below(6));  // many ties
    std::vector<double> g(static_cast<std::size_t>(n)), h(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = rng.uniform(-1, 1);
      h[i] = rng.uniform(0.01, 0.25);
    }
    const double lambda = rng.uniform(0, 2);
    const auto got = best_split(iota(static_cast<std::size_t>(n)), X, g, h, lambda);
    const auto want = oracle::exhaustive_split(rows_of(X), g, h, lambda);
    ASSERT_EQ(got.has_value(), want.has_value()) << "trial " << trial;
    if (!got) continue;
    EXPECT_NEAR(got->gain, want->gain, 1e-9 * std::max(1.0, want->gain));
    EXPECT_EQ(got->feature, want->feature);
    EXPECT_NEAR(got->threshold, want->threshold, 1e-12 * std::max(1.0, std::abs(want->threshold)));
  }
}

TEST(TrainGbdt, LoglossNonIncreasingWithFullSample) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 40;
    Matrix X(n, 3);
    Labels y(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = rng.uniform(-1, 1);
      y[static_cast<std::size_t>(i)] = X(i, 0) + 0.5 * rng.uniform(-1, 1) > 0 ? 1 : 0;
    }
    if (std::count(y.begin(), y.end(), 1) == 0) y[0] = 1;
    std::vector<double> trace;
    GbdtParams params{30, rng.uniform(0.01, 0.3), 1.0, 3, 1.0, 7};
    train_gbdt(X, y, params, &trace);
    ASSERT_EQ(trace.size(), 31u);
    for (std::size_t t = 1; t < trace.size(); ++t) EXPECT_LE(trace[t], trace[t - 1] + 1e-12);
  }
}

TEST(TrainGbdt, SeparableToyReachesFullAccuracy) {
  Rng rng(21);
  const Eigen::Index n = 200;
  Matrix X(n, 2);
  Labels y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = rng.uniform(-1, 1);
    X(i, 1) = rng.uniform(-1, 1);
    y[static_cast<std::size_t>(i)] = X(i, 0) > 0.1 ? 1 : 0;
  }
  const auto m = train_gbdt(X, y, {50, 0.1, 1.0, 6, 1.0, 0});
  EXPECT_EQ(accuracy(predict_proba(m, X), y), 1.0);
  for (const auto& t : m.trees) EXPECT_LE(t.depth(), 6);
}

TEST(TrainGbdt, SingleClassGivesPriorOnlyModel) {
  Matrix X = Matrix::Random(10, 3);
  const auto m = train_gbdt(X, Labels(10, 1), {5, 0.1, 1.0, 3, 1.0, 0});
  EXPECT_TRUE(m.single_class);
  ASSERT_EQ(m.trees.size(), 5u);
  for (const auto& t : m.trees) {
    ASSERT_EQ(t.nodes.size(), 1u);
    EXPECT_EQ(t.nodes[0].value, 0.0);
  }
  const auto p = predict_proba(m, X);
  for (Eigen::Index i = 0; i < 10; ++i) EXPECT_GT(p(i, 1), 0.99);
}

TEST(TrainGbdt, MarginIsBasePlusShrunkTreeSum) {
  Rng rng(4);
  Matrix X(30, 2);
  Labels y(30);
  for (Eigen::Index i = 0; i < 30; ++i) {
    X(i, 0) = rng.uniform();
    X(i, 1) = rng.uniform();
    y[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
  }
  const auto m = train_gbdt(X, y, {7, 0.2, 0.8, 2, 1.0, 3});
  for (Eigen::Index i = 0; i < 30; ++i) {
    std::vector<double> row(X.row(i).begin(), X.row(i).end());
    double sum = 0;
    for (const auto& t : m.trees) sum += t.predict(row);
    EXPECT_NEAR(m.margin(row), m.base_score + 0.2 * sum, 1e-12);
  }
}

TEST(TrainGbdt, DeterministicAndSeedSensitiveWhenSubsampling) {
  Matrix X = Matrix::Random(50, 3);
  Labels y(50);
  for (int i = 0; i < 50; ++i) y[static_cast<std::size_t>(i)] = X(i, 1) > 0;
  const GbdtParams p{10, 0.1, 0.8, 3, 1.0, 5};
  EXPECT_TRUE(train_gbdt(X, y, p) == train_gbdt(X, y, p));
  auto q = p;
  q.seed = 6;
  EXPECT_FALSE(train_gbdt(X, y, p) == train_gbdt(X, y, q));
}

TEST(TrainGbdt, Errors) {
  Matrix X = Matrix::Zero(3, 2);
  EXPECT_THROW(train_gbdt(X, Labels{0, 1}, {}), ShapeError);
  EXPECT_THROW(train_gbdt(X, Labels{0, 1, 2}, {}), ValidationError);
  EXPECT_THROW(train_gbdt(X, Labels{0, 1, 1}, {0, 0.1, 1.0, 3, 1.0, 0}), ConfigError);
  EXPECT_THROW(train_gbdt(X, Labels{0, 1, 1}, {5, 0.1, 1.5, 3, 1.0, 0}), ConfigError);
  const auto m = train_gbdt(X, Labels{0, 1, 1}, {2, 0.1, 1.0, 3, 1.0, 0});
  EXPECT_THROW(predict_proba(m, Matrix::Zero(1, 3)), ShapeError);
}

TEST(Logloss, KnownValue) {
  std::vector<double> p{0.5, 0.5};
  EXPECT_NEAR(logloss(p, Labels{0, 1}), std::log(2.0), 1e-15);
}
