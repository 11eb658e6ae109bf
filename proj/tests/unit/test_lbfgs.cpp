#include <gtest/gtest.h>

#include <cmath>

#include "surrogate/lbfgs.hpp"
#include "test_support.hpp"

using namespace surrogate;
using surrogate::testing::thrown_code;

namespace {

double sphere(std::span<const double> x, std::span<double> g) {
  double f = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    f += x[i] * x[i];
    g[i] = 2.0 * x[i];
  }
  return f;
}

double rosenbrock(std::span<const double> x, std::span<double> g) {
  const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
  g[0] = -2.0 * a - 400.0 * x[0] * b;
  g[1] = 200.0 * b;
  return a * a + 100.0 * b * b;
}

}  // namespace

TEST(Lbfgs, DefaultIterationCap) { EXPECT_EQ(LbfgsOptions{}.max_iter, 2000u); }

TEST(Lbfgs, SphereFromThreeFour) {
  LbfgsOptions o;
  o.grad_tol = 1e-10;
  const auto r = lbfgs_minimize(sphere, {3.0, 4.0}, o);
  EXPECT_LE(r.iterations, 5u);
  EXPECT_LT(std::hypot(r.x[0], r.x[1]), 1e-8);
  EXPECT_EQ(r.status, LbfgsStatus::Converged);
}

TEST(Lbfgs, Rosenbrock) {
  LbfgsOptions o;
  o.grad_tol = 1e-9;
  const auto r = lbfgs_minimize(rosenbrock, {-1.2, 1.0}, o);
  EXPECT_LT(r.f, 1e-8);
  EXPECT_LE(r.iterations, 2000u);
  EXPECT_NEAR(r.x[0], 1.0, 1e-3);
  EXPECT_NEAR(r.x[1], 1.0, 1e-3);
}

TEST(Lbfgs, IllConditionedQuadratic) {
  const std::vector<double> scale{1, 10, 100, 1000, 1e4};
  auto f = [&](std::span<const double> x, std::span<double> g) {
    double v = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      v += 0.5 * scale[i] * (x[i] - 1) * (x[i] - 1);
      g[i] = scale[i] * (x[i] - 1);
    }
    return v;
  };
  LbfgsOptions o;
  o.grad_tol = 1e-8;
  const auto r = lbfgs_minimize(f, std::vector<double>(5, 0.0), o);
  EXPECT_EQ(r.status, LbfgsStatus::Converged);
  for (double v : r.x) EXPECT_NEAR(v, 1.0, 1e-8);
}

TEST(Lbfgs, RespectsIterationCap) {
  LbfgsOptions o;
  o.max_iter = 3;
  o.grad_tol = 0.0;
  const auto r = lbfgs_minimize(rosenbrock, {-1.2, 1.0}, o);
  EXPECT_EQ(r.iterations, 3u);
  EXPECT_EQ(r.status, LbfgsStatus::MaxIterations);
}

TEST(Lbfgs, NonFiniteStart) {
  auto f = [](std::span<const double>, std::span<double> g) {
    g[0] = 0;
    return std::nan("");
  };
  EXPECT_EQ(thrown_code([&] { lbfgs_minimize(f, {1.0}); }), ErrorCode::NonFiniteObjective);
}

TEST(Lbfgs, WrongGradientEndsInLineSearchFailure) {
  // The reported gradient points uphill, so no step satisfies Armijo.
  auto f = [](std::span<const double> x, std::span<double> g) {
    g[0] = -2.0 * x[0];
    return x[0] * x[0];
  };
  const auto r = lbfgs_minimize(f, {1.0});
  EXPECT_EQ(r.status, LbfgsStatus::LineSearchFailure);
  EXPECT_EQ(r.x[0], 1.0);
}
