#include "rwmlab/kernel.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <sstream>

#include "rwmlab/error.hpp"

namespace rwmlab {

ChainState ChainState::at(const TargetSpec& target, std::vector<double> x) {
  ChainState s;
  s.log_p = target.log_density(x);
  s.norm_sq = 0.0;
  for (double v : x) s.norm_sq += v * v;
  s.x = std::move(x);
  return s;
}

RwmKernel::RwmKernel(TargetSpec target, IncrementSpec increment)
    : target_(std::move(target)),
      sampler_(increment, target_.dim()),
      buffer_(target_.dim(), 0.0) {}

void RwmKernel::refresh(ChainState& state) const {
  double norm_sq = 0.0;
  for (double v : state.x) norm_sq += v * v;
  state.norm_sq = norm_sq;
  state.log_p = target_.log_density_radial(norm_sq);
}

bool RwmKernel::proposal_is_zero(const ChainState& state, std::span<const double> w,
                                 IncrementSupport support) const {
  const auto& x = state.x;
  switch (support.kind) {
    case IncrementSupport::Kind::Dense:
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] + w[i] != 0.0) return false;
      }
      return true;
    case IncrementSupport::Kind::Single:
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = i == support.index ? x[i] + w[i] : x[i];
        if (v != 0.0) return false;
      }
      return true;
    case IncrementSupport::Kind::Zero:
      return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
  }
  return false;
}

StepRecord RwmKernel::finish(ChainState& state, double dot, double w_sq, double u,
                             std::span<const double> w, IncrementSupport support) {
  const std::size_t d = state.x.size();
  StepRecord rec;
  rec.step = state.step_index + 1;
  rec.z_before = state.norm_sq / static_cast<double>(d);
  rec.s_stat = dot + 0.5 * w_sq;

  double proposed_norm_sq = state.norm_sq + 2.0 * dot + w_sq;
  if (std::isnan(proposed_norm_sq)) {
    throw ChainError("proposal has a NaN squared norm");
  }
  proposed_norm_sq = std::max(proposed_norm_sq, 0.0);

  bool zero = false;
  if (target_.kind() == TargetKind::ScaleMixture &&
      proposed_norm_sq <= 1e-12 * std::max(state.norm_sq, w_sq)) {
    zero = proposal_is_zero(state, w, support);
  }

  double proposed_log_p = 0.0;
  if (zero) {
    // Probability-zero event; rejecting keeps the continuous part reversible.
    ++zero_proposals_;
    rec.zero_proposal = true;
    rec.log_ratio = -std::numeric_limits<double>::infinity();
  } else if (std::isinf(proposed_norm_sq)) {
    rec.log_ratio = -std::numeric_limits<double>::infinity();
  } else {
    proposed_log_p = target_.log_density_radial(proposed_norm_sq);
    rec.log_ratio = proposed_log_p - state.log_p;
  }

  rec.accepted = !zero && std::log(u) < std::min(0.0, rec.log_ratio);
  if (rec.accepted) {
    switch (support.kind) {
      case IncrementSupport::Kind::Dense:
        for (std::size_t i = 0; i < d; ++i) state.x[i] += w[i];
        break;
      case IncrementSupport::Kind::Single:
        state.x[support.index] += w[support.index];
        break;
      case IncrementSupport::Kind::Zero:
        break;
    }
    state.norm_sq = proposed_norm_sq;
    state.log_p = proposed_log_p;
    rec.jump_sq = w_sq;
    if (!std::isfinite(state.norm_sq) || !std::isfinite(state.log_p)) {
      throw ChainError("accepted state is not finite");
    }
  }

  ++state.step_index;
  if (state.step_index % kNormRefreshPeriod == 0) refresh(state);

#ifndef NDEBUG
  {
    double check = 0.0;
    for (double v : state.x) check += v * v;
    assert(std::abs(check - state.norm_sq) <= 1e-10 * std::max(1.0, check));
    assert(std::abs(target_.log_density_radial(check) - state.log_p) <=
           1e-8 * std::max(1.0, std::abs(state.log_p)));
  }
#endif
  return rec;
}

StepRecord RwmKernel::step(ChainState& state, Rng& rng) {
  const IncrementSupport support = sampler_.draw(rng, buffer_);
  double dot = 0.0;
  double w_sq = 0.0;
  switch (support.kind) {
    case IncrementSupport::Kind::Dense: {
      const double* x = state.x.data();
      const double* w = buffer_.data();
      const std::size_t d = buffer_.size();
      for (std::size_t i = 0; i < d; ++i) {
        dot += x[i] * w[i];
        w_sq += w[i] * w[i];
      }
      break;
    }
    case IncrementSupport::Kind::Single: {
      const double wk = buffer_[support.index];
      dot = state.x[support.index] * wk;
      w_sq = wk * wk;
      break;
    }
    case IncrementSupport::Kind::Zero:
      break;
  }
  const double u = rng.uniform_open();
  StepRecord rec = finish(state, dot, w_sq, u, buffer_, support);
  if (support.kind == IncrementSupport::Kind::Single) buffer_[support.index] = 0.0;
  return rec;
}

StepRecord RwmKernel::step_with(ChainState& state, std::span<const double> w, double u) {
  if (w.size() != state.x.size()) throw DomainError("step_with: increment length mismatch");
  if (!(u > 0.0 && u < 1.0)) throw DomainError("step_with: u must lie in (0, 1)");
  double dot = 0.0, w_sq = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    dot += state.x[i] * w[i];
    w_sq += w[i] * w[i];
  }
  return finish(state, dot, w_sq, u, w, {});
}

double RwmKernel::acceptance_probability(const ChainState& state,
                                         std::span<const double> w) const {
  if (w.size() != state.x.size()) throw DomainError("acceptance_probability: length mismatch");
  double dot = 0.0, w_sq = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    dot += state.x[i] * w[i];
    w_sq += w[i] * w[i];
  }
  const double proposed = std::max(state.norm_sq + 2.0 * dot + w_sq, 0.0);
  if (target_.kind() == TargetKind::ScaleMixture &&
      proposed <= 1e-12 * std::max(state.norm_sq, w_sq) && proposal_is_zero(state, w, {})) {
    return 0.0;
  }
  const double delta = target_.log_density_radial(proposed) - state.log_p;
  return std::exp(std::min(0.0, delta));
}

std::vector<double> Trajectory::tracked_series(std::size_t j) const {
  if (j >= tracked_ids.size()) throw RangeError("tracked_series: no such tracked coordinate");
  std::vector<double> out(n_states());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = tracked_at(i, j);
  return out;
}

namespace {

std::string dump_records(const std::array<StepRecord, 10>& ring, std::int64_t count) {
  std::ostringstream os;
  os.precision(17);
  const std::int64_t n = std::min<std::int64_t>(count, 10);
  for (std::int64_t i = count - n; i < count; ++i) {
    const StepRecord& r = ring[static_cast<std::size_t>(i % 10)];
    os << "\n  step=" << r.step << " accepted=" << r.accepted << " log_ratio=" << r.log_ratio
       << " s=" << r.s_stat << " z_before=" << r.z_before << " jump_sq=" << r.jump_sq;
  }
  return os.str();
}

}  // namespace

Trajectory run_chain(const TargetSpec& target, const IncrementSpec& increment,
                     const RunOptions& options) {
  if (options.n_steps < 0) throw ConfigError("run_chain: n_steps must be >= 0");
  if (options.record_stride < 1) throw ConfigError("run_chain: record_stride must be >= 1");
  const std::size_t d = target.dim();
  for (std::size_t id : options.tracked_coords) {
    if (id >= d) throw ConfigError("run_chain: tracked coordinate out of range");
  }

  Rng rng(options.seed);
  RwmKernel kernel(target, increment);
  ChainState state = ChainState::at(target, target.sample_stationary(rng));

  Trajectory traj;
  traj.dim = d;
  traj.target = target.describe();
  traj.increment = increment.describe();
  traj.seed = options.seed;
  traj.stride = options.record_stride;
  traj.tracked_ids = options.tracked_coords;

  const std::size_t n_tracked = options.tracked_coords.size();
  const auto n_records = static_cast<std::size_t>(options.n_steps / options.record_stride);
  traj.z.reserve(n_records + 1);
  traj.tracked.reserve((n_records + 1) * n_tracked);
  traj.accepted.reserve(n_records);
  traj.jump_sq.reserve(n_records);
  if (options.keep_step_records) traj.steps.reserve(n_records);

  TrajectorySummary& sum = traj.summary;
  sum.tracked_min.resize(n_tracked);
  sum.tracked_max.resize(n_tracked);

  auto record_state = [&] {
    traj.z.push_back(state.norm_sq_over_d());
    for (std::size_t id : options.tracked_coords) traj.tracked.push_back(state.x[id]);
  };
  auto update_extremes = [&] {
    const double z = state.norm_sq_over_d();
    sum.z_min = std::min(sum.z_min, z);
    sum.z_max = std::max(sum.z_max, z);
    for (std::size_t j = 0; j < n_tracked; ++j) {
      const double v = state.x[options.tracked_coords[j]];
      sum.tracked_min[j] = std::min(sum.tracked_min[j], v);
      sum.tracked_max[j] = std::max(sum.tracked_max[j], v);
    }
  };

  sum.z_min = sum.z_max = state.norm_sq_over_d();
  for (std::size_t j = 0; j < n_tracked; ++j) {
    sum.tracked_min[j] = sum.tracked_max[j] = state.x[options.tracked_coords[j]];
  }
  record_state();

  const std::int64_t horizon = std::min(options.degeneracy_horizon, options.n_steps);
  std::vector<double> lo, hi;
  if (horizon >= 0) {
    lo = state.x;
    hi = state.x;
    traj.degeneracy_curve.reserve(static_cast<std::size_t>(horizon) + 1);
    traj.degeneracy_curve.push_back(0.0);
  }

  std::array<StepRecord, 10> ring{};
  for (std::int64_t m = 1; m <= options.n_steps; ++m) {
    StepRecord rec;
    try {
      rec = kernel.step(state, rng);
    } catch (const ChainError& e) {
      throw ChainError(std::string(e.what()) + " at step " + std::to_string(m) +
                       "; last records:" + dump_records(ring, m - 1));
    }
    ring[static_cast<std::size_t>((m - 1) % 10)] = rec;
    if (rec.accepted) {
      ++sum.accepted;
      sum.sum_jump_sq += rec.jump_sq;
      update_extremes();
    }
    if (m % options.record_stride == 0) {
      record_state();
      traj.accepted.push_back(rec.accepted ? 1 : 0);
      traj.jump_sq.push_back(rec.jump_sq);
      if (options.keep_step_records) traj.steps.push_back(rec);
    }
    if (m <= horizon) {
      double worst = traj.degeneracy_curve.back();
      if (rec.accepted) {
        worst = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < d; ++k) {
          lo[k] = std::min(lo[k], state.x[k]);
          hi[k] = std::max(hi[k], state.x[k]);
          worst = std::min(worst, hi[k] - lo[k]);
        }
      }
      traj.degeneracy_curve.push_back(worst);
    }
  }
  sum.n_steps = options.n_steps;
  sum.zero_proposals = kernel.zero_proposals();
  return traj;
}

}  // namespace rwmlab
