#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rwmlab/error.hpp"
#include "rwmlab/increments.hpp"
#include "rwmlab/stats.hpp"

using namespace rwmlab;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

std::vector<IncrementSpec> all_families() {
  IncrementSpec t{IncrementFamily::StudentTIso, 1.0, 0.5};
  t.df = 2.0;
  IncrementSpec s{IncrementFamily::StableIso, 1.0, 0.5};
  s.alpha = 1.5;
  IncrementSpec c{IncrementFamily::CoordinateGaussian, 1.0, 0.5};
  c.p_move = 0.7;
  return {IncrementSpec::gaussian(2.38, 0.5), t, s, c, IncrementSpec{IncrementFamily::SphericalShell, 1.0, 0.5}};
}

}  // namespace

TEST(Increments, GaussianSquaredNormMatchesScale) {
  Rng rng(1);
  const std::size_t d = 100;
  double acc = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto w = sample_increment(IncrementSpec::gaussian(2.38, 0.5), d, rng);
    for (double v : w) acc += v * v;
  }
  EXPECT_NEAR(acc / 10000.0, 2.38 * 2.38, 0.02 * 2.38 * 2.38);
}

TEST(Increments, GaussianNormIsScaledChiSquare) {
  Rng rng(2);
  const std::size_t d = 50;
  const double l = 1.7;
  std::vector<double> q;
  for (int i = 0; i < 10000; ++i) {
    const auto w = sample_increment(IncrementSpec::gaussian(l, 0.5), d, rng);
    double s = 0.0;
    for (double v : w) s += v * v;
    q.push_back(s * static_cast<double>(d) / (l * l));
  }
  EXPECT_NEAR(stats::mean(q), 50.0, 0.05 * 50.0);
  EXPECT_NEAR(stats::variance(q), 100.0, 0.05 * 100.0);
}

TEST(Increments, ScaleRule) {
  IncrementSpec s = IncrementSpec::gaussian(2.0, 0.25);
  EXPECT_DOUBLE_EQ(s.scale(16), 1.0);
  s.gamma = 0.0;
  EXPECT_DOUBLE_EQ(s.scale(1000), 2.0);
}

TEST(Increments, CmsCollapsesAtAlphaTwo) {
  // alpha = 2: sin(2V)/cos(V)^{1/2} (cos(-V)/E)^{-1/2} = 2 sin(V) sqrt(E).
  for (double v : {-1.2, -0.3, 0.1, 0.9, 1.5}) {
    for (double e : {0.05, 1.0, 3.7}) {
      EXPECT_NEAR(cms_symmetric_stable(2.0, v, e), 2.0 * std::sin(v) * std::sqrt(e), 1e-12);
    }
  }
  EXPECT_DOUBLE_EQ(cms_symmetric_stable(1.0, 0.4, 2.0), std::tan(0.4));
}

TEST(Increments, StableAlphaTwoIsGaussianWithDoubleVariance) {
  Rng rng(3);
  IncrementSpec s{IncrementFamily::StableIso, 1.3, 0.0};
  s.alpha = 2.0;
  std::vector<double> first;
  for (int i = 0; i < 20000; ++i) first.push_back(sample_increment(s, 3, rng)[0]);
  const double sd = std::sqrt(2.0) * 1.3;
  EXPECT_TRUE(stats::ks_one_sample(first, [&](double x) { return normal_cdf(x / sd); }).pass);
}

TEST(Increments, EveryFamilyHasZeroMean) {
  Rng rng(4);
  for (const auto& spec : all_families()) {
    if (spec.family == IncrementFamily::StableIso || spec.family == IncrementFamily::StudentTIso) continue;
    const std::size_t d = 4, n = 100000;
    std::vector<std::vector<double>> cols(d);
    for (std::size_t i = 0; i < n; ++i) {
      const auto w = sample_increment(spec, d, rng);
      for (std::size_t j = 0; j < d; ++j) cols[j].push_back(w[j]);
    }
    for (const auto& c : cols) {
      const double se = std::sqrt(stats::variance(c) / static_cast<double>(n));
      EXPECT_LT(std::abs(stats::mean(c)), 4.0 * se) << spec.describe();
    }
  }
}

TEST(Increments, HeavyFamiliesHaveZeroMedian) {
  // Infinite-variance families (t with df=2, stable 1.5): the sample median
  // is the location test that still has a normal limit.
  Rng rng(5);
  for (const auto& spec : all_families()) {
    if (spec.family != IncrementFamily::StableIso && spec.family != IncrementFamily::StudentTIso) continue;
    std::vector<double> x;
    for (int i = 0; i < 100000; ++i) x.push_back(sample_increment(spec, 2, rng)[0]);
    std::size_t below = 0;
    for (double v : x) below += v < 0.0;
    EXPECT_NEAR(static_cast<double>(below) / 1e5, 0.5, 4.0 * 0.5 / std::sqrt(1e5)) << spec.describe();
  }
}

TEST(Increments, FlipSymmetryHoldsForEveryFamily) {
  Rng rng(6);
  for (const auto& spec : all_families()) {
    const auto r = flip_symmetry_check(spec, 8, 20000, rng);
    EXPECT_TRUE(r.pass) << spec.describe() << " discrepancy " << r.max_discrepancy << " > " << r.critical;
  }
  IncrementSpec cauchy{IncrementFamily::StableIso, 1.0, 0.5};
  cauchy.alpha = 1.0;
  EXPECT_TRUE(flip_symmetry_check(cauchy, 8, 20000, rng).pass);
}

TEST(Increments, FlipSymmetryDetectsShift) {
  Rng rng(7);
  VectorSampler shifted = [](Rng& r, std::span<double> out) {
    for (double& v : out) v = 0.5 + r.normal();
  };
  EXPECT_FALSE(flip_symmetry_check(shifted, 8, 20000, rng).pass);
}

TEST(Increments, CoordinateFamilyAtDimensionOneIsGaussian) {
  Rng ra(8), rb(9);
  IncrementSpec c{IncrementFamily::CoordinateGaussian, 1.5, 0.5};
  std::vector<double> a, b;
  for (int i = 0; i < 20000; ++i) {
    a.push_back(sample_increment(c, 1, ra)[0]);
    b.push_back(sample_increment(IncrementSpec::gaussian(1.5, 0.5), 1, rb)[0]);
  }
  EXPECT_TRUE(stats::ks_two_sample(a, b).pass);
}

TEST(Increments, CoordinateSupportShapes) {
  Rng rng(10);
  IncrementSpec c{IncrementFamily::CoordinateGaussian, 1.0, 0.5};
  c.p_move = 0.3;
  IncrementSampler sampler(c, 10);
  std::vector<double> w(10, 0.0);
  int zeros = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    std::fill(w.begin(), w.end(), 0.0);
    const auto s = sampler.draw(rng, w);
    if (s.kind == IncrementSupport::Kind::Zero) {
      ++zeros;
      for (double v : w) EXPECT_EQ(v, 0.0);
    } else {
      ASSERT_EQ(s.kind, IncrementSupport::Kind::Single);
      for (std::size_t j = 0; j < 10; ++j) {
        if (j != s.index) EXPECT_EQ(w[j], 0.0);
      }
    }
  }
  EXPECT_NEAR(zeros / static_cast<double>(n), 0.7, 4.0 * std::sqrt(0.21 / n));
}

TEST(Increments, ShellHasFixedRadius) {
  Rng rng(11);
  IncrementSpec s{IncrementFamily::SphericalShell, 2.0, 0.5};
  for (int i = 0; i < 100; ++i) {
    const auto w = sample_increment(s, 64, rng);
    double n2 = 0.0;
    for (double v : w) n2 += v * v;
    EXPECT_NEAR(std::sqrt(n2), 2.0, 1e-12);
  }
}

TEST(Increments, InvalidParametersAreConfigErrors) {
  IncrementSpec t{IncrementFamily::StudentTIso, 1.0, 0.5};
  t.df = 0.0;
  EXPECT_THROW(t.validate(), ConfigError);
  IncrementSpec s{IncrementFamily::StableIso, 1.0, 0.5};
  s.alpha = 2.5;
  EXPECT_THROW(s.validate(), ConfigError);
  s.alpha = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  IncrementSpec c{IncrementFamily::CoordinateGaussian, 1.0, 0.5};
  c.p_move = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(IncrementSpec::gaussian(-1.0, 0.5).validate(), ConfigError);
  EXPECT_THROW(family_from_name("levy"), ConfigError);
  EXPECT_EQ(family_from_name("stable_iso"), IncrementFamily::StableIso);
}
