#include <gtest/gtest.h>

#include <cstdlib>

#include "surrogate/forest.hpp"
#include "test_support.hpp"

using namespace surrogate;
using surrogate::testing::thrown_code;

namespace {

Matrix column(std::initializer_list<double> values) {
  Matrix X;
  for (double v : values) X.push_row(std::span<const double>(&v, 1));
  return X;
}

}  // namespace

TEST(Gini, HandValues) {
  EXPECT_DOUBLE_EQ(gini_impurity(std::vector<int>{0, 0, 1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(gini_impurity(std::vector<int>{1, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(gini_impurity(std::vector<int>{0, 0, 0, 1}), 0.375);
  EXPECT_EQ(thrown_code([] { gini_impurity({}); }), ErrorCode::EmptySet);
}

TEST(Forest, Defaults) {
  ForestParams p;
  EXPECT_EQ(p.n_trees, 10000u);
  EXPECT_EQ(p.max_depth, 15u);
  EXPECT_TRUE(p.bootstrap);
}

TEST(Forest, ThresholdSeparableColumn) {
  const auto X = column({0, 1, 2, 3});
  const std::vector<int> y{0, 0, 1, 1};
  ForestParams p;
  p.n_trees = 100;
  p.max_depth = 2;
  p.bootstrap = false;
  const auto f = ForestModel::train(X, y, p);
  EXPECT_EQ(f.predict(X), y);
  EXPECT_DOUBLE_EQ(f.trees()[0].nodes()[0].threshold, 1.5);
}

TEST(Forest, SingleClassGivesCertainLeaf) {
  const auto X = column({0, 1, 2});
  ForestParams p;
  p.n_trees = 5;
  const auto f = ForestModel::train(X, std::vector<int>{1, 1, 1}, p);
  for (double v : f.predict_proba(X)) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(f.trees()[0].nodes().size(), 1u);
}

TEST(Forest, MeanOfTreeLeaves) {
  DecisionTree low({{-1, 0, -1, -1, 0.2}});
  DecisionTree high({{-1, 0, -1, -1, 0.8}});
  ForestModel f(ForestParams{}, 1, {low, high}, {1.0});
  const double x = 0.0;
  EXPECT_DOUBLE_EQ(f.predict_proba(std::span<const double>(&x, 1)), 0.5);
  const std::vector<double> wide{0.0, 1.0};
  EXPECT_EQ(thrown_code([&] { f.predict_proba(std::span<const double>(wide)); }), ErrorCode::DimensionMismatch);
}

TEST(Forest, TrainingPointOnPureLeaf) {
  const auto X = column({0, 1, 2, 3, 4, 5});
  const std::vector<int> y{0, 1, 0, 1, 0, 1};
  ForestParams p;
  p.n_trees = 1;
  p.bootstrap = false;
  p.max_depth = ForestParams::kUnboundedDepth;
  const auto f = ForestModel::train(X, y, p);
  EXPECT_EQ(f.predict_proba(X.row(1)), 1.0);
  EXPECT_EQ(f.predict_proba(X.row(2)), 0.0);
}

TEST(Forest, DepthLimitRespected) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  Matrix X(300, 3);
  std::vector<int> y(300);
  for (std::size_t i = 0; i < 300; ++i) {
    for (std::size_t c = 0; c < 3; ++c) X(i, c) = u(rng);
    y[i] = u(rng) < 0.5;
  }
  for (std::size_t depth : {1u, 3u, 6u}) {
    ForestParams p;
    p.n_trees = 8;
    p.max_depth = depth;
    p.seed = 4;
    const auto f = ForestModel::train(X, y, p);
    for (const auto& t : f.trees()) EXPECT_LE(t.depth(), depth);
  }
}

TEST(Forest, InvalidInputs) {
  ForestParams p;
  p.n_trees = 2;
  EXPECT_EQ(thrown_code([&] { ForestModel::train(Matrix{}, {}, p); }), ErrorCode::EmptyData);
  EXPECT_EQ(thrown_code([&] { ForestModel::train(column({1}), std::vector<int>{1}, p); }), ErrorCode::SingleSample);
  EXPECT_EQ(thrown_code([&] { ForestModel::train(column({1, 2}), std::vector<int>{1}, p); }),
            ErrorCode::LengthMismatch);
  p.n_trees = 0;
  EXPECT_EQ(thrown_code([&] { ForestModel::train(column({1, 2}), std::vector<int>{0, 1}, p); }),
            ErrorCode::InvalidParams);
}

TEST(Forest, ImportanceFindsInformativeFeature) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  Matrix X(200, 4);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t c = 0; c < 4; ++c) X(i, c) = u(rng);
    y[i] = X(i, 2) > 0.6;
  }
  ForestParams p;
  p.n_trees = 50;
  p.seed = 1;
  const auto f = ForestModel::train(X, y, p);
  const auto& imp = f.feature_importances();
  EXPECT_NEAR(std::accumulate(imp.begin(), imp.end(), 0.0), 1.0, 1e-12);
  EXPECT_EQ(std::max_element(imp.begin(), imp.end()) - imp.begin(), 2);
}

TEST(Forest, ThreadCountDoesNotChangeModel) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  Matrix X(80, 5);
  std::vector<int> y(80);
  for (std::size_t i = 0; i < 80; ++i) {
    for (std::size_t c = 0; c < 5; ++c) X(i, c) = u(rng);
    y[i] = X(i, 0) + X(i, 1) > 1.0;
  }
  ForestParams p;
  p.n_trees = 30;
  p.seed = 11;
  setenv("SURROGATE_THREADS", "1", 1);
  const auto a = ForestModel::train(X, y, p).body_to_json();
  setenv("SURROGATE_THREADS", "4", 1);
  const auto b = ForestModel::train(X, y, p).body_to_json();
  unsetenv("SURROGATE_THREADS");
  EXPECT_EQ(a, b);
}
