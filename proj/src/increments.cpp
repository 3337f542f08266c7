#include "rwmlab/increments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rwmlab/error.hpp"
#include "rwmlab/stats.hpp"

namespace rwmlab {

std::string family_name(IncrementFamily family) {
  switch (family) {
    case IncrementFamily::GaussianIso: return "gaussian_iso";
    case IncrementFamily::StudentTIso: return "student_t_iso";
    case IncrementFamily::StableIso: return "stable_iso";
    case IncrementFamily::CoordinateGaussian: return "coordinate_gaussian";
    case IncrementFamily::SphericalShell: return "spherical_shell";
  }
  return "unknown";
}

IncrementFamily family_from_name(const std::string& name) {
  for (auto f : {IncrementFamily::GaussianIso, IncrementFamily::StudentTIso,
                 IncrementFamily::StableIso, IncrementFamily::CoordinateGaussian,
                 IncrementFamily::SphericalShell}) {
    if (family_name(f) == name) return f;
  }
  throw ConfigError("unknown increment family '" + name + "'");
}

void IncrementSpec::validate() const {
  if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("increment.l must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("increment.gamma must be >= 0");
  switch (family) {
    case IncrementFamily::StudentTIso:
      if (!(df > 0.0) || !std::isfinite(df)) throw ConfigError("increment.df must be > 0");
      break;
    case IncrementFamily::StableIso:
      if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("increment.alpha must lie in (0, 2]");
      break;
    case IncrementFamily::CoordinateGaussian:
      if (!(p_move > 0.0 && p_move <= 1.0)) {
        throw ConfigError("increment.p_move must lie in (0, 1]");
      }
      break;
    default:
      break;
  }
}

double IncrementSpec::scale(std::size_t d) const {
  return l * std::pow(static_cast<double>(d), -gamma);
}

std::string IncrementSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << family_name(family) << "(l=" << l << ",gamma=" << gamma;
  switch (family) {
    case IncrementFamily::StudentTIso: os << ",df=" << df; break;
    case IncrementFamily::StableIso: os << ",alpha=" << alpha; break;
    case IncrementFamily::CoordinateGaussian: os << ",p_move=" << p_move; break;
    default: break;
  }
  os << ")";
  return os.str();
}

double cms_symmetric_stable(double alpha, double v, double e) {
  if (alpha == 1.0) return std::tan(v);
  const double cos_v = std::cos(v);
  return std::sin(alpha * v) / std::pow(cos_v, 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / e, (1.0 - alpha) / alpha);
}

double sample_symmetric_stable(double alpha, Rng& rng) {
  const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
  const double e = rng.exponential();
  return cms_symmetric_stable(alpha, v, e);
}

IncrementSampler::IncrementSampler(IncrementSpec spec, std::size_t d)
    : spec_(spec), d_(d), scale_(0.0) {
  if (d == 0) throw ConfigError("increment dimension must be positive");
  spec_.validate();
  scale_ = spec_.scale(d);
}

IncrementSupport IncrementSampler::draw(Rng& rng, std::span<double> out) const {
  if (out.size() != d_) throw DomainError("increment draw: wrong output length");
  switch (spec_.family) {
    case IncrementFamily::GaussianIso:
      for (double& w : out) w = scale_ * rng.normal();
      return {};
    case IncrementFamily::StudentTIso:
      for (double& w : out) w = scale_ * rng.student_t(spec_.df);
      return {};
    case IncrementFamily::StableIso:
      for (double& w : out) w = scale_ * sample_symmetric_stable(spec_.alpha, rng);
      return {};
    case IncrementFamily::CoordinateGaussian: {
      if (spec_.p_move < 1.0 && rng.uniform_open() >= spec_.p_move) {
        return {IncrementSupport::Kind::Zero, 0};
      }
      const std::size_t k = rng.below(d_);
      out[k] = scale_ * rng.normal();
      return {IncrementSupport::Kind::Single, k};
    }
    case IncrementFamily::SphericalShell: {
      // Fixed radius scale * sqrt(d), i.e. the typical length of the matching
      // Gaussian draw, times a uniform direction.
      double norm_sq = 0.0;
      for (double& w : out) {
        w = rng.normal();
        norm_sq += w * w;
      }
      const double radius = scale_ * std::sqrt(static_cast<double>(d_));
      const double factor = radius / std::sqrt(norm_sq);
      for (double& w : out) w *= factor;
      return {};
    }
  }
  return {};
}

std::vector<double> sample_increment(const IncrementSpec& spec, std::size_t d, Rng& rng) {
  IncrementSampler sampler(spec, d);
  std::vector<double> w(d, 0.0);
  sampler.draw(rng, w);
  return w;
}

namespace {

struct SignedMagnitude {
  double magnitude;
  int sign;
};

// sqrt(n_nonzero)^{-1} * max_t |#{a < -t} - #{a > t}|, walking thresholds from
// the largest magnitude down. Equal magnitudes enter together.
double flip_statistic(std::vector<SignedMagnitude>& proj) {
  std::sort(proj.begin(), proj.end(),
            [](const auto& a, const auto& b) { return a.magnitude > b.magnitude; });
  if (proj.empty()) return 0.0;
  long long walk = 0;
  long long worst = 0;
  std::size_t i = 0;
  while (i < proj.size()) {
    const double m = proj[i].magnitude;
    while (i < proj.size() && proj[i].magnitude == m) {
      walk += proj[i].sign;
      ++i;
    }
    worst = std::max(worst, walk < 0 ? -walk : walk);
  }
  return static_cast<double>(worst) / std::sqrt(static_cast<double>(proj.size()));
}

}  // namespace

SymmetryReport flip_symmetry_check(const VectorSampler& sampler, std::size_t d,
                                   std::size_t n_samples, Rng& rng, std::size_t n_directions) {
  if (n_samples < 1000) throw ConfigError("flip_symmetry_check needs n_samples >= 1000");
  if (n_directions == 0) throw ConfigError("flip_symmetry_check needs at least one direction");

  std::vector<double> directions(n_directions * d);
  for (std::size_t j = 0; j < n_directions; ++j) {
    double norm_sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double g = rng.normal();
      directions[j * d + k] = g;
      norm_sq += g * g;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (std::size_t k = 0; k < d; ++k) directions[j * d + k] *= inv;
  }

  std::vector<std::vector<SignedMagnitude>> proj(n_directions);
  for (auto& p : proj) p.reserve(n_samples);
  std::vector<double> w(d);
  for (std::size_t i = 0; i < n_samples; ++i) {
    std::fill(w.begin(), w.end(), 0.0);
    sampler(rng, w);
    for (std::size_t j = 0; j < n_directions; ++j) {
      double a = 0.0;
      for (std::size_t k = 0; k < d; ++k) a += w[k] * directions[j * d + k];
      if (a != 0.0) proj[j].push_back({std::abs(a), a > 0.0 ? 1 : -1});
    }
  }

  SymmetryReport report;
  report.n_samples = n_samples;
  report.n_directions = n_directions;
  for (auto& p : proj) report.max_discrepancy = std::max(report.max_discrepancy, flip_statistic(p));
  report.critical =
      stats::sup_abs_brownian_quantile(1.0 - 0.01 / static_cast<double>(n_directions));
  report.pass = report.max_discrepancy < report.critical;
  return report;
}

SymmetryReport flip_symmetry_check(const IncrementSpec& spec, std::size_t d,
                                   std::size_t n_samples, Rng& rng, std::size_t n_directions) {
  IncrementSampler sampler(spec, d);
  return flip_symmetry_check([&sampler](Rng& r, std::span<double> out) { sampler.draw(r, out); },
                             d, n_samples, rng, n_directions);
}

}  // namespace rwmlab
