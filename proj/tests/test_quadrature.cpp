#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "rwmlab/error.hpp"
#include "rwmlab/quadrature.hpp"

namespace quad = rwmlab::quad;
constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(Quadrature, GaussianIntegralOverRealLine) {
  const double v = quad::integral([](double x) { return std::exp(-x * x); }, -kInf, kInf);
  EXPECT_NEAR(v, std::sqrt(std::numbers::pi), 1e-10);
}

TEST(Quadrature, HalfLines) {
  EXPECT_NEAR(quad::integral([](double x) { return std::exp(-x); }, 0.0, kInf), 1.0, 1e-10);
  EXPECT_NEAR(quad::integral([](double x) { return std::exp(x); }, -kInf, 0.0), 1.0, 1e-10);
}

TEST(Quadrature, IntegrableEndpointSingularity) {
  EXPECT_NEAR(quad::integral([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0), 2.0, 1e-8);
}

TEST(Quadrature, BreakpointsHandleKinks) {
  const auto r = quad::integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, {0.3});
  EXPECT_NEAR(r.value, 0.5 * (0.09 + 0.49), 1e-12);
}

TEST(Quadrature, IntervalCapRaises) {
  quad::Options opts;
  opts.abs_tol = 1e-15;
  opts.max_intervals = 8;
  EXPECT_THROW(quad::integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, opts), rwmlab::NumericError);
}
