#pragma once

// Random-walk Metropolis chain:
//   X_m = X_{m-1} + W_m  with probability min{1, p(X_{m-1} + W_m) / p(X_{m-1})}
//   X_m = X_{m-1}        otherwise,
// with W_m iid from a symmetric increment law. The acceptance test is done
// in the log domain from the generic log-density difference for every target.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rwmlab/increments.hpp"
#include "rwmlab/rng.hpp"
#include "rwmlab/targets.hpp"

namespace rwmlab {

struct ChainState {
  std::vector<double> x;
  double log_p = 0.0;    // cached log_density(x)
  double norm_sq = 0.0;  // cached |x|^2, incrementally updated
  std::int64_t step_index = 0;

  double norm_sq_over_d() const { return norm_sq / static_cast<double>(x.size()); }

  /// State at `x` with freshly computed caches.
  static ChainState at(const TargetSpec& target, std::vector<double> x);
};

struct StepRecord {
  std::int64_t step = 0;    // m
  bool accepted = false;
  bool zero_proposal = false;  // x + W == 0 under a scale mixture, auto-rejected
  double log_ratio = 0.0;   // log p(x*) - log p(x)
  double s_stat = 0.0;      // <X_{m-1}, W_m> + |W_m|^2 / 2
  double z_before = 0.0;    // |X_{m-1}|^2 / d
  double jump_sq = 0.0;     // |X_m - X_{m-1}|^2
};

/// Full recomputation of |x|^2 happens every this many steps.
inline constexpr std::int64_t kNormRefreshPeriod = std::int64_t{1} << 14;

class RwmKernel {
 public:
  RwmKernel(TargetSpec target, IncrementSpec increment);

  /// One Metropolis step with a fresh increment and uniform from `rng`.
  StepRecord step(ChainState& state, Rng& rng);

  /// One step with a given increment and uniform u in (0, 1); accepts iff
  /// log(u) < min{0, log_ratio}.
  StepRecord step_with(ChainState& state, std::span<const double> w, double u);

  /// min{1, p(x + w) / p(x)} (0 for a zero proposal under a scale mixture).
  double acceptance_probability(const ChainState& state, std::span<const double> w) const;

  const TargetSpec& target() const noexcept { return target_; }
  const IncrementSampler& sampler() const noexcept { return sampler_; }
  std::int64_t zero_proposals() const noexcept { return zero_proposals_; }

 private:
  StepRecord finish(ChainState& state, double dot, double w_sq, double u,
                    std::span<const double> w, IncrementSupport support);
  bool proposal_is_zero(const ChainState& state, std::span<const double> w,
                        IncrementSupport support) const;
  void refresh(ChainState& state) const;

  TargetSpec target_;
  IncrementSampler sampler_;
  std::vector<double> buffer_;
  std::int64_t zero_proposals_ = 0;
};

struct RunOptions {
  std::int64_t n_steps = 0;
  std::int64_t record_stride = 1;
  std::vector<std::size_t> tracked_coords{0};
  std::uint64_t seed = 0;
  bool keep_step_records = true;
  /// Record the min-over-coordinates range curve for steps 0..horizon.
  /// Negative disables it (it costs O(d) per accepted step).
  std::int64_t degeneracy_horizon = -1;
};

struct TrajectorySummary {
  std::int64_t n_steps = 0;
  std::int64_t accepted = 0;
  std::int64_t zero_proposals = 0;
  double sum_jump_sq = 0.0;
  std::vector<double> tracked_min, tracked_max;
  double z_min = 0.0, z_max = 0.0;

  double acceptance_rate() const {
    return n_steps > 0 ? static_cast<double>(accepted) / static_cast<double>(n_steps) : 0.0;
  }
};

struct Trajectory {
  std::size_t dim = 0;
  std::string target;
  std::string increment;
  std::uint64_t seed = 0;
  std::int64_t stride = 1;
  std::vector<std::size_t> tracked_ids;

  /// States m = 0, stride, 2 stride, ... <= n_steps.
  std::vector<double> z;
  std::vector<double> tracked;  // row-major: state i, tracked coordinate j
  /// Steps m = stride, 2 stride, ...
  std::vector<std::uint8_t> accepted;
  std::vector<double> jump_sq;
  std::vector<StepRecord> steps;  // only with keep_step_records
  /// degeneracy_curve[M] = min_k (max_{i<=M} X_{i,k} - min_{i<=M} X_{i,k}).
  std::vector<double> degeneracy_curve;

  TrajectorySummary summary;

  std::size_t n_states() const { return z.size(); }
  double tracked_at(std::size_t state, std::size_t j) const {
    return tracked[state * tracked_ids.size() + j];
  }
  /// Series of tracked coordinate j over recorded states.
  std::vector<double> tracked_series(std::size_t j) const;
};

/// Runs a stationary chain (X_0 ~ P^d drawn from the same stream). The output
/// is a deterministic function of (target, increment, options).
Trajectory run_chain(const TargetSpec& target, const IncrementSpec& increment,
                     const RunOptions& options);

}  // namespace rwmlab
