#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rwmlab/kernel.hpp"
#include "rwmlab/stats.hpp"

using namespace rwmlab;

namespace {

ChainState gaussian_state(std::size_t d, Rng& rng) {
  const auto target = TargetSpec::standard_gaussian(d);
  return ChainState::at(target, target.sample_stationary(rng));
}

}  // namespace

TEST(Kernel, ZeroIncrementIsAccepted) {
  Rng rng(1);
  RwmKernel k(TargetSpec::standard_gaussian(5), IncrementSpec::gaussian(1.0, 0.5));
  auto st = gaussian_state(5, rng);
  const auto before = st.x;
  const std::vector<double> w(5, 0.0);
  const auto rec = k.step_with(st, w, 0.999);
  EXPECT_TRUE(rec.accepted);
  EXPECT_EQ(rec.log_ratio, 0.0);
  EXPECT_EQ(st.x, before);
}

TEST(Kernel, StatisticOfLogTwoHalvesAcceptance) {
  // x = (1), w = t with t + t^2/2 = ln 2.
  RwmKernel k(TargetSpec::standard_gaussian(1), IncrementSpec::gaussian(1.0, 0.5));
  const double t = -1.0 + std::sqrt(1.0 + 2.0 * std::numbers::ln2);
  auto st = ChainState::at(TargetSpec::standard_gaussian(1), {1.0});
  const std::vector<double> w{t};
  EXPECT_NEAR(k.acceptance_probability(st, w), 0.5, 1e-14);

  auto a = st;
  const auto rec = k.step_with(a, w, 0.4999);
  EXPECT_NEAR(rec.s_stat, std::numbers::ln2, 1e-14);
  EXPECT_NEAR(rec.log_ratio, -rec.s_stat, 1e-14);
  EXPECT_TRUE(rec.accepted);
  EXPECT_NEAR(a.x[0], 1.0 + t, 1e-15);

  auto b = st;
  EXPECT_FALSE(k.step_with(b, w, 0.5001).accepted);
  EXPECT_EQ(b.x[0], 1.0);
}

TEST(Kernel, UphillMovesAlwaysAccepted) {
  Rng rng(2);
  RwmKernel k(TargetSpec::standard_gaussian(3), IncrementSpec::gaussian(1.0, 0.5));
  auto st = ChainState::at(TargetSpec::standard_gaussian(3), {2.0, -1.0, 0.5});
  const std::vector<double> w{-0.5, 0.2, -0.1};
  const auto rec = k.step_with(st, w, std::nextafter(1.0, 0.0));
  EXPECT_GE(rec.log_ratio, 0.0);
  EXPECT_TRUE(rec.accepted);
}

TEST(Kernel, ZeroProposalUnderMixtureIsRejected) {
  const auto t = TargetSpec::student_t(2, 3.0);
  RwmKernel k(t, IncrementSpec::gaussian(1.0, 0.5));
  auto st = ChainState::at(t, {0.3, -0.7});
  const std::vector<double> w{-0.3, 0.7};
  EXPECT_EQ(k.acceptance_probability(st, w), 0.0);
  const auto rec = k.step_with(st, w, 1e-300);
  EXPECT_TRUE(rec.zero_proposal);
  EXPECT_FALSE(rec.accepted);
  EXPECT_EQ(k.zero_proposals(), 1);
}

TEST(Kernel, GaussianAcceptanceMatchesMonteCarlo) {
  const std::size_t d = 50;
  const double l = 2.38;
  // Oracle: E min{1, exp(-S)} with S = <X, W> + |W|^2/2 drawn directly.
  Rng orng(99);
  double oracle = 0.0;
  const int n_oracle = 200000;
  for (int i = 0; i < n_oracle; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double x = orng.normal();
      const double w = l / std::sqrt(static_cast<double>(d)) * orng.normal();
      s += x * w + 0.5 * w * w;
    }
    oracle += std::exp(-std::max(s, 0.0));
  }
  oracle /= n_oracle;

  RunOptions opt;
  opt.n_steps = 100000;
  opt.seed = 7;
  opt.keep_step_records = false;
  const auto traj = run_chain(TargetSpec::standard_gaussian(d), IncrementSpec::gaussian(l, 0.5), opt);
  EXPECT_NEAR(traj.summary.acceptance_rate(), oracle, 0.01);
}

TEST(Kernel, ZeroStepsGivesInitialStateOnly) {
  RunOptions opt;
  opt.n_steps = 0;
  opt.seed = 3;
  const auto traj = run_chain(TargetSpec::standard_gaussian(4), IncrementSpec::gaussian(1.0, 0.5), opt);
  EXPECT_EQ(traj.n_states(), 1u);
  EXPECT_TRUE(traj.accepted.empty());
  EXPECT_EQ(traj.summary.acceptance_rate(), 0.0);
}

TEST(Kernel, RunIsDeterministic) {
  RunOptions opt;
  opt.n_steps = 2000;
  opt.seed = 11;
  const auto t = TargetSpec::student_t(8, 3.0);
  const auto a = run_chain(t, IncrementSpec::gaussian(2.0, 0.5), opt);
  const auto b = run_chain(t, IncrementSpec::gaussian(2.0, 0.5), opt);
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.tracked, b.tracked);
  EXPECT_EQ(a.accepted, b.accepted);
  opt.seed = 12;
  EXPECT_NE(run_chain(t, IncrementSpec::gaussian(2.0, 0.5), opt).z, a.z);
}

TEST(Kernel, StationaryChainKeepsGaussianMoments) {
  RunOptions opt;
  opt.n_steps = 200000;
  opt.seed = 13;
  opt.keep_step_records = false;
  const auto traj = run_chain(TargetSpec::standard_gaussian(1), IncrementSpec::gaussian(2.4, 0.5), opt);
  const auto x = traj.tracked_series(0);
  std::vector<double> x2(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) x2[i] = x[i] * x[i];
  EXPECT_LT(std::abs(stats::mean(x)), 4.0 * stats::batch_means_se(x));
  EXPECT_LT(std::abs(stats::mean(x2) - 1.0), 4.0 * stats::batch_means_se(x2));
}

TEST(Kernel, DetailedBalanceAcrossBins) {
  // Flux between adjacent cells of a partition of R must balance.
  RunOptions opt;
  opt.n_steps = 400000;
  opt.seed = 17;
  opt.keep_step_records = false;
  const auto traj = run_chain(TargetSpec::standard_gaussian(1), IncrementSpec::gaussian(1.5, 0.5), opt);
  const auto x = traj.tracked_series(0);
  auto cell = [](double v) { return v < -0.5 ? 0 : (v < 0.5 ? 1 : 2); };
  double flow[3][3] = {};
  for (std::size_t i = 1; i < x.size(); ++i) flow[cell(x[i - 1])][cell(x[i])] += 1.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      const double n = flow[a][b] + flow[b][a];
      EXPECT_LT(std::abs(flow[a][b] - flow[b][a]), 5.0 * std::sqrt(n)) << a << "->" << b;
    }
  }
}

TEST(Kernel, NormCacheSurvivesRefreshPeriod) {
  Rng rng(19);
  const std::size_t d = 20;
  const auto t = TargetSpec::student_t(d, 3.0);
  RwmKernel k(t, IncrementSpec::gaussian(2.0, 0.5));
  auto st = ChainState::at(t, t.sample_stationary(rng));
  for (std::int64_t i = 0; i < 3 * kNormRefreshPeriod + 7; ++i) k.step(st, rng);
  double n2 = 0.0;
  for (double v : st.x) n2 += v * v;
  EXPECT_NEAR(st.norm_sq, n2, 1e-10 * n2);
  EXPECT_NEAR(st.log_p, t.log_density(st.x), 1e-10);
  EXPECT_EQ(st.step_index, 3 * kNormRefreshPeriod + 7);
}
