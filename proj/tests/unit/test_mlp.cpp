#include <gtest/gtest.h>

#include <cmath>

#include "surrogate/mlp.hpp"
#include "test_support.hpp"

using namespace surrogate;
using surrogate::testing::thrown_code;

namespace {

MlpModel random_net(std::mt19937_64& rng, std::vector<std::size_t> widths) {
  auto m = MlpModel::zeros(widths);
  std::vector<double> flat(m.parameter_count());
  std::normal_distribution<double> n(0.0, 0.7);
  for (auto& v : flat) v = n(rng);
  m.set_flat_parameters(flat);
  return m;
}

Matrix random_inputs(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Matrix X(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) X(r, c) = u(rng);
  }
  return X;
}

}  // namespace

TEST(Mlp, ZeroNetworkOutputsHalf) {
  const std::vector<std::size_t> widths{3, 5, 1};
  const auto m = MlpModel::zeros(widths);
  const std::vector<double> x{0.3, -2.0, 7.0};
  EXPECT_EQ(m.predict_proba(x), 0.5);
}

TEST(Mlp, HandComposedForwardPass) {
  const std::vector<std::size_t> widths{1, 1, 1};
  auto m = MlpModel::zeros(widths);
  m.set_flat_parameters(std::vector<double>{1.0, 0.0, 1.0, 0.0});
  const double zero = 0.0, one = 1.0;
  EXPECT_DOUBLE_EQ(m.predict_proba(std::span<const double>(&zero, 1)), 0.5);
  const double expected = 1.0 / (1.0 + std::exp(-std::tanh(1.0)));
  EXPECT_NEAR(m.predict_proba(std::span<const double>(&one, 1)), expected, 1e-15);
  EXPECT_NEAR(expected, 0.681700, 1e-6);
}

TEST(Mlp, LossOfUninformativeModelIsLn2) {
  const std::vector<std::size_t> widths{2, 4, 1};
  const auto m = MlpModel::zeros(widths);
  std::mt19937_64 rng(1);
  const auto X = random_inputs(rng, 10, 2);
  const std::vector<int> y{0, 1, 1, 0, 1, 0, 0, 1, 1, 1};
  EXPECT_NEAR(m.loss_and_grad(X, y, 0.0).first, std::log(2.0), 1e-15);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    auto m = random_net(rng, {4, 3, 1});
    const auto X = random_inputs(rng, 12, 4);
    std::vector<int> y(12);
    for (auto& v : y) v = std::uniform_int_distribution<int>(0, 1)(rng);
    const double alpha = 0.01;
    const auto [loss, grad] = m.loss_and_grad(X, y, alpha);
    const auto numeric = surrogate::testing::finite_difference(
        [&](std::span<const double> w) {
          auto copy = m;
          copy.set_flat_parameters(w);
          return copy.loss_and_grad(X, y, alpha).first;
        },
        m.flat_parameters());
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const double scale = std::max({std::abs(grad[i]), std::abs(numeric[i]), 1e-6});
      EXPECT_LT(std::abs(grad[i] - numeric[i]) / scale, 1e-5) << "param " << i;
    }
  }
}

TEST(Mlp, PenaltyAddsAlphaTimesWeight) {
  std::mt19937_64 rng(3);
  const auto m = random_net(rng, {3, 4, 2, 1});
  const auto X = random_inputs(rng, 7, 3);
  const std::vector<int> y{1, 0, 0, 1, 1, 0, 1};
  const auto g0 = m.loss_and_grad(X, y, 0.0).second;
  const auto g1 = m.loss_and_grad(X, y, 0.1).second;
  const auto w = m.flat_parameters();
  std::size_t offset = 0;
  for (const auto& layer : m.layers()) {
    for (std::size_t k = 0; k < layer.weights.size(); ++k, ++offset) {
      EXPECT_NEAR(g1[offset] - g0[offset], 0.1 * w[offset], 1e-14);
    }
    for (std::size_t k = 0; k < layer.bias.size(); ++k, ++offset) EXPECT_EQ(g1[offset], g0[offset]);
  }
}

TEST(Mlp, LearnsXorOnMostSeeds) {
  Matrix X;
  for (auto p : {std::array<double, 2>{0, 0}, {0, 1}, {1, 0}, {1, 1}}) X.push_row(p);
  const std::vector<int> y{0, 1, 1, 0};
  int solved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    MlpParams p;
    p.hidden_sizes = {8};
    p.alpha = 0.0;
    p.seed = seed;
    solved += MlpModel::train(X, y, p).predict(X) == y;
  }
  EXPECT_GE(solved, 8);
}

TEST(Mlp, SeparableLine) {
  Matrix X;
  std::vector<int> y;
  for (int i = 0; i < 20; ++i) {
    const double v = i / 19.0;
    X.push_row(std::span<const double>(&v, 1));
    y.push_back(v > 0.5);
  }
  MlpParams p;
  p.hidden_sizes = {4};
  p.seed = 1;
  EXPECT_EQ(MlpModel::train(X, y, p).predict(X), y);
}

TEST(Mlp, SingleClassSaturates) {
  std::mt19937_64 rng(4);
  const auto X = random_inputs(rng, 6, 2);
  MlpParams p;
  p.hidden_sizes = {3};
  p.alpha = 0.0;
  const auto m = MlpModel::train(X, std::vector<int>(6, 1), p);
  for (double v : m.predict_proba(X)) EXPECT_GT(v, 0.99);
}

TEST(Mlp, ProbabilitiesStayInsideOpenInterval) {
  const std::vector<std::size_t> widths{1, 1, 1};
  auto m = MlpModel::zeros(widths);
  m.set_flat_parameters(std::vector<double>{1.0, 0.0, 1e4, 0.0});
  const double big = 50.0, small = -50.0;
  EXPECT_LT(m.predict_proba(std::span<const double>(&big, 1)), 1.0);
  m.set_flat_parameters(std::vector<double>{1.0, 0.0, -1e4, 0.0});
  EXPECT_GT(m.predict_proba(std::span<const double>(&big, 1)), 0.0);
  EXPECT_GT(m.predict_proba(std::span<const double>(&small, 1)), 0.0);
}

TEST(Mlp, ConstructorChecks) {
  DenseLayer a{2, 3, std::vector<double>(6, 0.1), std::vector<double>(3, 0.0)};
  DenseLayer b{4, 1, std::vector<double>(4, 0.1), std::vector<double>(1, 0.0)};
  EXPECT_EQ(thrown_code([&] { MlpModel({a, b}); }), ErrorCode::DimensionMismatch);
  DenseLayer c{3, 1, {0.1, NAN, 0.2}, {0.0}};
  EXPECT_EQ(thrown_code([&] { MlpModel({a, c}); }), ErrorCode::NonFiniteWeights);
}

TEST(Mlp, TrainingIsSeedDeterministic) {
  std::mt19937_64 rng(6);
  const auto X = random_inputs(rng, 30, 3);
  std::vector<int> y(30);
  for (std::size_t i = 0; i < 30; ++i) y[i] = X(i, 0) > X(i, 1);
  MlpParams p;
  p.hidden_sizes = {5};
  p.seed = 9;
  EXPECT_EQ(MlpModel::train(X, y, p).flat_parameters(), MlpModel::train(X, y, p).flat_parameters());
}
