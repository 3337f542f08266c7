#include "rwmlab/diagnostics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>

#include "rwmlab/error.hpp"
#include "rwmlab/stats.hpp"

namespace rwmlab::diag {
namespace {

std::size_t states_through(const Trajectory& traj, std::int64_t m, const char* what) {
  if (m < 0) throw RangeError(std::string(what) + ": M must be >= 0");
  if (m > traj.summary.n_steps) {
    throw RangeError(std::string(what) + ": M exceeds the trajectory length");
  }
  // Recorded states are 0, stride, 2 stride, ...
  return static_cast<std::size_t>(m / traj.stride) + 1;
}

}  // namespace

double degeneracy_statistic(const Trajectory& traj, std::int64_t m) {
  if (m < 0) throw RangeError("degeneracy_statistic: M must be >= 0");
  if (traj.degeneracy_curve.empty()) {
    throw RangeError("degeneracy_statistic: chain was run without a degeneracy horizon");
  }
  if (static_cast<std::size_t>(m) >= traj.degeneracy_curve.size()) {
    throw RangeError("degeneracy_statistic: M exceeds the recorded horizon");
  }
  return traj.degeneracy_curve[static_cast<std::size_t>(m)];
}

double coordinate_range(const Trajectory& traj, std::size_t j, std::int64_t m) {
  if (j >= traj.tracked_ids.size()) throw RangeError("coordinate_range: no such tracked coordinate");
  const std::size_t n = states_through(traj, m, "coordinate_range");
  double lo = traj.tracked_at(0, j), hi = lo;
  for (std::size_t i = 1; i < n; ++i) {
    lo = std::min(lo, traj.tracked_at(i, j));
    hi = std::max(hi, traj.tracked_at(i, j));
  }
  return hi - lo;
}

double z_oscillation(const Trajectory& traj, double t, std::int64_t alpha_d) {
  if (!(t >= 0.0) || alpha_d < 0) throw RangeError("z_oscillation: T and alpha_d must be >= 0");
  const auto horizon = static_cast<std::int64_t>(std::floor(t * static_cast<double>(alpha_d)));
  const std::size_t n = states_through(traj, horizon, "z_oscillation");
  const auto [lo, hi] = std::minmax_element(traj.z.begin(), traj.z.begin() + static_cast<long>(n));
  return *hi - *lo;
}

std::vector<double> functional_series(const Trajectory& traj, const BoundedFunction& f,
                                      std::span<const std::size_t> coords) {
  for (std::size_t c : coords) {
    if (c >= traj.tracked_ids.size()) throw RangeError("functional_series: no such tracked coordinate");
  }
  std::vector<double> point(coords.size());
  std::vector<double> out(traj.n_states());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < coords.size(); ++j) point[j] = traj.tracked_at(i, coords[j]);
    out[i] = f(point);
  }
  return out;
}

ErgodicError ergodic_error(const Trajectory& traj, const BoundedFunction& f,
                           std::span<const std::size_t> coords, double reference, std::int64_t m) {
  std::vector<double> series = functional_series(traj, f, coords);
  if (m >= 0) series.resize(states_through(traj, m, "ergodic_error"));
  ErgodicError out;
  out.n_terms = series.size();
  out.running_mean = stats::mean(series);
  out.error = std::abs(out.running_mean - reference);
  out.batch_se = series.size() >= 4 ? stats::batch_means_se(series) : 0.0;
  return out;
}

Threshold threshold_crossing(const Trajectory& traj, const BoundedFunction& f,
                             std::span<const std::size_t> coords, double reference, double eps) {
  if (!(eps > 0.0)) throw ConfigError("threshold_crossing: eps must be positive");
  const std::vector<double> series = functional_series(traj, f, coords);
  // Scan backwards for the last time the running mean was outside the band.
  std::vector<double> running(series.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    sum += series[i];
    running[i] = sum / static_cast<double>(i + 1);
  }
  std::size_t first_inside = series.size();
  for (std::size_t i = series.size(); i-- > 0;) {
    if (!(std::abs(running[i] - reference) < eps)) break;
    first_inside = i;
  }
  if (first_inside == series.size()) return {traj.summary.n_steps, true};
  return {static_cast<std::int64_t>(first_inside) * traj.stride, false};
}

double esjd(const Trajectory& traj) {
  if (traj.jump_sq.empty()) return 0.0;
  return stats::mean(traj.jump_sq);
}

std::string iact_status_name(IactStatus status) {
  switch (status) {
    case IactStatus::Ok: return "ok";
    case IactStatus::Degenerate: return "degenerate";
    case IactStatus::Truncated: return "truncated";
  }
  return "unknown";
}

namespace {

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

std::vector<double> autocovariance(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n == 0) return {};
  const double mu = stats::mean(series);
  std::size_t len = 1;
  while (len < 2 * n) len <<= 1;
  const std::size_t n_freq = len / 2 + 1;

  std::unique_ptr<double, FftwFree> buf(static_cast<double*>(fftw_malloc(sizeof(double) * len)));
  std::unique_ptr<fftw_complex, FftwFree> spec(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_freq)));
  if (!buf || !spec) throw NumericError("autocovariance: FFT buffer allocation failed");

  fftw_plan forward, backward;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(len), buf.get(), spec.get(), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(len), spec.get(), buf.get(), FFTW_ESTIMATE);
  }
  double* x = buf.get();
  for (std::size_t i = 0; i < n; ++i) x[i] = series[i] - mu;
  std::fill(x + n, x + len, 0.0);
  fftw_execute(forward);
  fftw_complex* c = spec.get();
  for (std::size_t k = 0; k < n_freq; ++k) {
    c[k][0] = c[k][0] * c[k][0] + c[k][1] * c[k][1];
    c[k][1] = 0.0;
  }
  fftw_execute(backward);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  // Unnormalized inverse: divide by len, then by n for the biased estimator.
  std::vector<double> acov(n);
  const double scale = 1.0 / (static_cast<double>(len) * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) acov[i] = x[i] * scale;
  return acov;
}

IactResult iact(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 1000) throw DomainError("iact: series needs at least 1000 points");
  IactResult out;
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (*lo == *hi) {
    out.status = IactStatus::Degenerate;
    out.tau = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const std::vector<double> acov = autocovariance(series);
  out.variance = acov[0];
  const double mu = stats::mean(series);
  if (!(acov[0] > 1e-26 * std::max(mu * mu, std::numeric_limits<double>::min()))) {
    out.status = IactStatus::Degenerate;
    out.tau = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const std::size_t max_lag = n / 2;
  double sum = 0.0;
  std::size_t k = 0;
  bool stopped = false;
  for (; 2 * k + 1 < max_lag; ++k) {
    const double gamma_k = (acov[2 * k] + acov[2 * k + 1]) / acov[0];
    if (gamma_k <= 0.0) {
      stopped = true;
      break;
    }
    sum += gamma_k;
  }
  out.tau = -1.0 + 2.0 * sum;
  out.window = 2 * k;
  out.status = stopped ? IactStatus::Ok : IactStatus::Truncated;
  return out;
}

namespace {

double median_of(std::vector<double> v) { return stats::median(v); }

stats::LineFit fit_medians(std::span<const RatePoint> points, std::size_t drop,
                           std::vector<double>* log_d, std::vector<double>* log_cost) {
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    std::vector<double> costs;
    for (std::size_t i = 0; i < p.costs.size(); ++i) {
      if (i != drop) costs.push_back(p.costs[i]);
    }
    xs.push_back(std::log(p.d));
    ys.push_back(std::log(median_of(std::move(costs))));
  }
  if (log_d) *log_d = xs;
  if (log_cost) *log_cost = ys;
  return stats::least_squares(xs, ys);
}

}  // namespace

RateFit fit_rate(std::span<const RatePoint> points) {
  std::vector<double> ds;
  std::size_t min_seeds = std::numeric_limits<std::size_t>::max();
  std::size_t max_seeds = 0;
  for (const auto& p : points) {
    if (!(p.d > 0.0)) throw ConfigError("fit_rate: dimensions must be positive");
    if (p.costs.empty()) throw ConfigError("fit_rate: a dimension has no cost values");
    for (double c : p.costs) {
      if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("fit_rate: costs must be positive and finite");
    }
    ds.push_back(p.d);
    min_seeds = std::min(min_seeds, p.costs.size());
    max_seeds = std::max(max_seeds, p.costs.size());
  }
  std::sort(ds.begin(), ds.end());
  if (std::unique(ds.begin(), ds.end()) - ds.begin() < 4) {
    throw ConfigError("fit_rate: needs at least 4 distinct dimensions");
  }

  RateFit fit;
  const auto full = fit_medians(points, std::numeric_limits<std::size_t>::max(), &fit.log_d, &fit.log_cost);
  fit.slope = full.slope;
  fit.intercept = full.intercept;
  fit.residual_max = full.residual_max;
  fit.n_seeds = max_seeds;

  if (min_seeds < 2) {
    fit.half_width = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  // Delete-one-seed jackknife over the seed index.
  std::vector<double> slopes;
  for (std::size_t i = 0; i < max_seeds; ++i) slopes.push_back(fit_medians(points, i, nullptr, nullptr).slope);
  const double nj = static_cast<double>(slopes.size());
  const double mean = stats::mean(slopes);
  double ss = 0.0;
  for (double s : slopes) ss += (s - mean) * (s - mean);
  fit.half_width = 1.96 * std::sqrt((nj - 1.0) / nj * ss);
  return fit;
}

}  // namespace rwmlab::diag
