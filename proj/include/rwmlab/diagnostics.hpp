#pragma once

// Estimators over finished trajectories: coordinate degeneracy, oscillation
// of Z = |X|^2 / d, ergodic-average error, jump distance, integrated
// autocorrelation time, and log-log rate fits.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rwmlab/kernel.hpp"
#include "rwmlab/targets.hpp"

namespace rwmlab::diag {

/// min over coordinates k of (max_{i<=M} X_{i,k} - min_{i<=M} X_{i,k}).
/// Needs the chain run with degeneracy_horizon >= M; otherwise RangeError.
double degeneracy_statistic(const Trajectory& traj, std::int64_t m);

/// Range of tracked coordinate j over steps 0..M (recorded states only).
double coordinate_range(const Trajectory& traj, std::size_t j, std::int64_t m);

/// max - min of Z over steps 0..floor(T * alpha_d). Uses the recorded states,
/// so it is exact for record_stride = 1. RangeError if the chain is shorter.
double z_oscillation(const Trajectory& traj, double t, std::int64_t alpha_d);

struct ErgodicError {
  double error = 0.0;         // |running mean - reference|
  double running_mean = 0.0;
  double batch_se = 0.0;      // batch-means SE of the running mean
  std::size_t n_terms = 0;
};

/// f is applied to the tracked coordinates listed in `coords` (positions in
/// traj.tracked_ids) over recorded states 0..M (M < 0: all states).
ErgodicError ergodic_error(const Trajectory& traj, const BoundedFunction& f,
                           std::span<const std::size_t> coords, double reference,
                           std::int64_t m = -1);

/// Series f(tracked coordinates) over the recorded states.
std::vector<double> functional_series(const Trajectory& traj, const BoundedFunction& f,
                                      std::span<const std::size_t> coords);

/// Smallest recorded step M after which the running-mean error stays below
/// eps up to the end of the chain. censored = true when it never settles.
struct Threshold {
  std::int64_t m = 0;
  bool censored = false;
};
Threshold threshold_crossing(const Trajectory& traj, const BoundedFunction& f,
                             std::span<const std::size_t> coords, double reference, double eps);

/// Mean of the recorded |X_m - X_{m-1}|^2.
double esjd(const Trajectory& traj);

enum class IactStatus { Ok, Degenerate, Truncated };
std::string iact_status_name(IactStatus status);

struct IactResult {
  double tau = 0.0;
  IactStatus status = IactStatus::Ok;
  std::size_t window = 0;  // number of lags summed
  double variance = 0.0;
};

/// Integrated autocorrelation time tau = 1 + 2 sum_{t>=1} rho_t, truncated by
/// Geyer's initial positive sequence rule: with Gamma_k = rho_{2k} + rho_{2k+1},
/// sum while Gamma_k > 0 and stop at the first k with Gamma_k <= 0 (a zero
/// pair stops the sum). tau = -1 + 2 sum Gamma_k. Autocovariances use the
/// biased (divide by n) estimator via FFT.
///
/// Degenerate: the series is constant, or its variance is below 1e-26 times
/// the squared mean (rounding residue); tau is reported as NaN. Truncated: no nonpositive pair
/// before lag n/2, tau is the partial sum. Throws DomainError for n < 1000.
IactResult iact(std::span<const double> series);

/// Autocovariance at lags 0..n-1 (biased, mean removed).
std::vector<double> autocovariance(std::span<const double> series);

struct RatePoint {
  double d = 0.0;
  std::vector<double> costs;  // one per seed, aligned by seed index across points
};

struct RateFit {
  std::vector<double> log_d;
  std::vector<double> log_cost;  // log of the per-d median
  double slope = 0.0;
  double intercept = 0.0;
  double residual_max = 0.0;
  double half_width = 0.0;  // 1.96 * jackknife-over-seeds SE; NaN with < 2 seeds
  std::size_t n_seeds = 0;
};

/// OLS of log(median cost) on log d. Needs >= 4 distinct d and positive costs.
RateFit fit_rate(std::span<const RatePoint> points);

}  // namespace rwmlab::diag
