#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include "rwmlab/analytic.hpp"
#include "rwmlab/error.hpp"

using namespace rwmlab;
namespace an = rwmlab::analytic;

namespace {

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double phi_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Dense midpoint-rule oracle for the sphere marginal against N(0, 1).
struct GridDistances {
  double tv = 0.0;
  double w1 = 0.0;
};
GridDistances brute_force_distances(std::size_t d) {
  const double dd = static_cast<double>(d);
  const double log_b = std::lgamma(0.5) + std::lgamma(0.5 * (dd - 1.0)) - std::lgamma(0.5 * dd);
  const double lo = -12.0, hi = 12.0;
  const std::size_t n = 2'000'000;
  const double h = (hi - lo) / n;
  GridDistances out;
  double fd_cdf = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = lo + (i + 0.5) * h;
    double f = 0.0;
    if (u * u < dd) f = std::exp(0.5 * (dd - 3.0) * std::log1p(-u * u / dd) - 0.5 * std::log(dd) - log_b);
    out.tv += 0.5 * std::abs(f - phi_pdf(u)) * h;
    fd_cdf += 0.5 * f * h;
    out.w1 += std::abs(fd_cdf - phi_cdf(u)) * h;
    fd_cdf += 0.5 * f * h;
  }
  return out;
}

}  // namespace

TEST(Acceptance, LightExamples) {
  EXPECT_EQ(an::alpha_light(-3.0), 1.0);
  EXPECT_EQ(an::alpha_light(0.0), 1.0);
  EXPECT_NEAR(an::alpha_light(0.5), std::exp(-0.5), 1e-16);
}

TEST(Acceptance, GaussianHeavyFormIsExact) {
  // chi^2 ratio collapses: alpha^d(s; z) = exp(-s z) for s > 0.
  const auto ctx = an::HeavyAcceptanceCtx::gaussian(40);
  for (double z : {0.6, 1.0, 1.7}) {
    for (double s : {-2.0, 0.0, 0.3, 4.0}) {
      EXPECT_NEAR(an::alpha_heavy(ctx, s, z), std::exp(-std::max(s, 0.0) * z), 1e-12);
    }
  }
}

TEST(Acceptance, StudentHeavyFormMatchesDensityRatio) {
  const double nu = 3.0;
  for (std::size_t d : {5, 50, 500}) {
    const auto ctx = an::HeavyAcceptanceCtx::student_t(d, nu);
    const double dd = static_cast<double>(d);
    for (double z : {0.7, 1.0, 1.4}) {
      for (double s : {0.01, 0.5, 3.0}) {
        const double r0 = dd * z, r1 = dd * z * (1.0 + 2.0 * s / dd);
        const double ratio = std::pow((1.0 + r0 / nu) / (1.0 + r1 / nu), 0.5 * (nu + dd));
        EXPECT_NEAR(an::alpha_heavy(ctx, s, z), ratio, 1e-12 * std::max(1.0, ratio)) << d;
      }
    }
  }
}

TEST(Acceptance, QdMatchesReferenceDensities) {
  const std::size_t d = 30;
  const double dd = static_cast<double>(d);
  const boost::math::fisher_f f(dd, 4.0);
  const boost::math::chi_squared c(dd);
  const auto t = an::HeavyAcceptanceCtx::student_t(d, 4.0);
  const auto g = an::HeavyAcceptanceCtx::gaussian(d);
  for (double z : {0.3, 0.9, 1.0, 2.5}) {
    EXPECT_NEAR(t.qd(z), boost::math::pdf(f, z), 1e-12);
    EXPECT_NEAR(g.qd(z), dd * boost::math::pdf(c, dd * z), 1e-12);
  }
}

TEST(Acceptance, HPairDefinition) {
  const auto ctx = an::HeavyAcceptanceCtx::gaussian(10);
  const auto p = an::h_and_hd(ctx, 2.0, 1.0);
  EXPECT_NEAR(p.h, 2.0 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(p.hd, 2.0 * std::exp(-2.0), 1e-12);
  const auto n = an::h_and_hd(ctx, -1.5, 0.8);
  EXPECT_EQ(n.h, -1.5);
  EXPECT_EQ(n.hd, -1.5);
}

TEST(Acceptance, DomainAndGridErrors) {
  const auto ctx = an::HeavyAcceptanceCtx::student_t(10, 3.0);
  EXPECT_THROW(an::alpha_heavy(ctx, 1.0, 0.0), DomainError);
  EXPECT_THROW(an::alpha_heavy(ctx, std::nan(""), 1.0), DomainError);
  EXPECT_THROW(an::HeavyAcceptanceCtx::student_t(10, 0.0), ConfigError);
  EXPECT_THROW(an::HeavyAcceptanceCtx::gaussian(10, 1.0), ConfigError);
  const std::vector<double> z{1.0};
  const std::vector<double> s_out{60.0};
  EXPECT_THROW(an::hd_uniform_deviation(ctx, s_out, z), ConfigError);
  const std::vector<double> s{1.0};
  const std::vector<double> z_out{3.0};
  EXPECT_THROW(an::hd_uniform_deviation(ctx, s, z_out), ConfigError);
  for (double v : an::default_z_grid(2.0)) EXPECT_TRUE(ctx.in_window(v));
}

TEST(Acceptance, ReconstructionAgreesWithKernelRatio) {
  Rng rng(3);
  const auto r = an::alpha_reconstruction_check(TargetSpec::student_t(20, 3.0), 2000, rng);
  EXPECT_EQ(r.n_pairs, 2000u);
  EXPECT_LT(r.max_rel_error, 1e-9);
  EXPECT_THROW(an::alpha_reconstruction_check(TargetSpec::standard_gaussian(5), 10, rng), ConfigError);
}

TEST(Nsigma, Moments) {
  for (double sigma : {0.1, 1.0, 3.0}) {
    const auto m = an::nsigma_moments(sigma);
    EXPECT_NEAR(m.mean, 0.5 * sigma * sigma, 1e-9);
    EXPECT_NEAR(m.variance, sigma * sigma, 1e-9);
  }
}

TEST(Nsigma, GirsanovBattery) {
  for (double sigma : {0.25, 1.0, 4.0}) {
    for (const auto& g : an::girsanov_battery()) {
      EXPECT_LT(std::abs(an::girsanov_residual(sigma, g.f)), 1e-9) << g.name << " " << sigma;
    }
  }
}

TEST(Nsigma, MuClosedForms) {
  // mu_0 = 2 Phi(-sigma/2); mu_1 = 2 E[-S; S < 0].
  for (double sigma : {0.2, 1.0, 2.5, 6.0}) {
    const double m = 0.5 * sigma * sigma;
    EXPECT_NEAR(an::mu_k(sigma, 0), 2.0 * phi_cdf(-sigma / 2.0), 1e-14);
    const double e_neg = sigma * phi_pdf(m / sigma) - m * phi_cdf(-m / sigma);
    EXPECT_NEAR(an::mu_k(sigma, 1), 2.0 * e_neg, 1e-13);
    EXPECT_NEAR(an::mu_k_quadrature(sigma, 1), an::mu_k(sigma, 1), 1e-9);
  }
  EXPECT_THROW(an::mu_k(0.0, 1), DomainError);
  EXPECT_THROW(an::mu_k(1.0, -1), DomainError);
}

TEST(Nsigma, HExpectationVanishes) {
  for (double sigma : {0.5, 2.0, 8.0}) EXPECT_LT(std::abs(an::nsigma_h_expectation(sigma)), 1e-9);
}

TEST(Nsigma, Sigma2Mu0HasInteriorPeak) {
  const auto p = an::sigma2_mu0_profile();
  EXPECT_TRUE(p.interior);
  EXPECT_TRUE(p.decreasing_after);
  EXPECT_THROW(an::sigma2_mu0_profile(0, 1), ConfigError);
}

TEST(Sphere, MassAndMoments) {
  for (std::size_t d : {2, 3, 10, 100}) {
    const double dd = static_cast<double>(d);
    EXPECT_NEAR(an::sphere_marginal_total_mass(d), 1.0, 1e-10);
    const auto m = an::sphere_marginal_moments(d);
    EXPECT_NEAR(m.mean, 0.0, 1e-10);
    EXPECT_NEAR(m.variance, 1.0, 1e-9);
    EXPECT_NEAR(an::sphere_marginal_moment(d, 2.0), 1.0, 1e-12);
    EXPECT_NEAR(an::sphere_marginal_moment(d, 4.0), 3.0 * dd / (dd + 2.0), 1e-12);
  }
  EXPECT_THROW(an::sphere_marginal_density(1, 0.0), DomainError);
  EXPECT_THROW(an::sphere_marginal_moment(5, -1.0), DomainError);
}

TEST(Sphere, DistancesMatchDenseGrid) {
  for (std::size_t d : {6, 10, 40}) {
    const auto ref = brute_force_distances(d);
    EXPECT_NEAR(an::sphere_marginal_distance(d, an::Metric::TV), ref.tv, 1e-6) << d;
    EXPECT_NEAR(an::sphere_marginal_distance(d, an::Metric::W1), ref.w1, 1e-6) << d;
    EXPECT_LE(an::sphere_marginal_distance(d, an::Metric::TV), an::diaconis_bound(d, an::Metric::TV));
    EXPECT_LE(an::sphere_marginal_distance(d, an::Metric::W1), an::diaconis_bound(d, an::Metric::W1));
  }
  EXPECT_THROW(an::diaconis_bound(4, an::Metric::TV), DomainError);
}

TEST(Sphere, BetaLawAcceptsSamplerRejectsGaussian) {
  Rng rng(5);
  EXPECT_TRUE(an::beta_law_check(10, 20000, rng).pass);
  std::vector<double> g(100000);
  for (double& v : g) v = rng.normal();
  EXPECT_FALSE(an::beta_law_check(10, g).pass);
}

TEST(Exchangeable, TwoPointExample) {
  an::DiscreteJoint j{{0.0, 1.0}, {0.0, 0.5, 0.5, 0.0}};
  const auto r = an::exchangeable_pair_check(j, [](double x) { return x; });
  ASSERT_TRUE(r.exchangeable);
  EXPECT_NEAR(r.lhs1, 0.5, 1e-15);
  EXPECT_NEAR(r.lhs2, 0.5, 1e-15);
  EXPECT_NEAR(r.rhs2, 0.5, 1e-15);
  EXPECT_EQ(r.tie_term, 0.0);
}

TEST(Exchangeable, RandomTablesSatisfyIdentities) {
  Rng rng(6);
  auto f = [](double x) { return std::sin(3.0 * x) + x; };
  for (int rep = 0; rep < 50; ++rep) {
    const auto j = an::random_symmetric_joint(6, rng, false);
    const auto r = an::exchangeable_pair_check(j, f);
    ASSERT_TRUE(r.exchangeable) << r.message;
    EXPECT_LT(std::abs(r.residual1), 1e-14);
    EXPECT_LT(std::abs(r.residual2), 1e-14);
  }
}

TEST(Exchangeable, DiagonalMassShowsAsTieTerm) {
  Rng rng(7);
  const auto j = an::random_symmetric_joint(5, rng, true);
  const auto r = an::exchangeable_pair_check(j, [](double x) { return 1.0 + x * x; });
  ASSERT_TRUE(r.exchangeable);
  EXPECT_GT(r.tie_term, 0.0);
  EXPECT_NEAR(r.rhs2 - r.lhs2, r.tie_term, 1e-14);
}

TEST(Exchangeable, AsymmetricTableRejected) {
  an::DiscreteJoint j{{0.0, 1.0}, {0.1, 0.5, 0.3, 0.1}};
  const auto r = an::exchangeable_pair_check(j, [](double x) { return x; });
  EXPECT_FALSE(r.exchangeable);
  EXPECT_FALSE(r.message.empty());
}
