#include "rwmlab/targets.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>


#include "rwmlab/error.hpp"
#include "rwmlab/quadrature.hpp"

namespace rwmlab {

MixingLaw MixingLaw::inverse_gamma(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw ConfigError("inverse-gamma mixing needs nu > 0");
  }
  return {MixingKind::InverseGamma, nu};
}

double MixingLaw::log_density(double y) const {
  if (kind != MixingKind::InverseGamma) {
    throw DomainError("Dirac mixing law has no density");
  }
  if (!(y > 0.0)) return -std::numeric_limits<double>::infinity();
  // InverseGamma(a, b) with a = b = nu/2:
  //   q(y) = b^a / Gamma(a) * y^{-a-1} * exp(-b / y)
  const double a = 0.5 * nu;
  return a * std::log(a) - std::lgamma(a) - (a + 1.0) * std::log(y) - a / y;
}

double MixingLaw::density(double y) const { return std::exp(log_density(y)); }

double MixingLaw::density_derivative(double y) const {
  if (!(y > 0.0)) return 0.0;
  const double a = 0.5 * nu;
  return density(y) * (-(a + 1.0) / y + a / (y * y));
}

double MixingLaw::sample(Rng& rng) const {
  if (kind == MixingKind::Dirac1) return 1.0;
  // 1 / Gamma(shape nu/2, rate nu/2)
  return 1.0 / rng.gamma(0.5 * nu, 2.0 / nu);
}

TargetSpec TargetSpec::standard_gaussian(std::size_t dim) {
  if (dim == 0) throw ConfigError("target dimension must be positive");
  return {TargetKind::StandardGaussian, dim, std::nullopt};
}

TargetSpec TargetSpec::scale_mixture(std::size_t dim, MixingLaw mixing) {
  if (dim == 0) throw ConfigError("target dimension must be positive");
  if (mixing.kind == MixingKind::InverseGamma) {
    mixing = MixingLaw::inverse_gamma(mixing.nu);  // validates nu
  }
  return {TargetKind::ScaleMixture, dim, mixing};
}

TargetSpec TargetSpec::with_dim(std::size_t dim) const {
  if (dim == 0) throw ConfigError("target dimension must be positive");
  TargetSpec copy = *this;
  copy.dim_ = dim;
  return copy;
}

double TargetSpec::log_density_radial(double norm_sq) const {
  if (heavy_tailed()) {
    const double nu = mixing_->nu;
    return -0.5 * (nu + static_cast<double>(dim_)) * std::log1p(norm_sq / nu);
  }
  return -0.5 * norm_sq;
}

double TargetSpec::log_density(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw DomainError("log_density: vector length does not match target dimension");
  }
  double norm_sq = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("log_density: non-finite coordinate");
    norm_sq += v * v;
  }
  if (kind_ == TargetKind::ScaleMixture && norm_sq == 0.0) {
    throw DomainError("log_density: the zero vector is outside the scale-mixture domain");
  }
  return log_density_radial(norm_sq);
}

void TargetSpec::sample_stationary(Rng& rng, std::span<double> out) const {
  if (out.size() != dim_) throw DomainError("sample_stationary: wrong output length");
  const double scale = mixing_ ? std::sqrt(mixing_->sample(rng)) : 1.0;
  for (double& v : out) v = scale * rng.normal();
}

std::vector<double> TargetSpec::sample_stationary(Rng& rng) const {
  std::vector<double> x(dim_);
  sample_stationary(rng, x);
  return x;
}

std::string TargetSpec::kind_name() const { return heavy_tailed() ? "student_t" : "gaussian"; }

std::string TargetSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind_ == TargetKind::StandardGaussian) {
    os << "gaussian";
  } else if (heavy_tailed()) {
    os << "student_t(nu=" << mixing_->nu << ")";
  } else {
    os << "mixture(dirac1)";
  }
  return os.str();
}

BoundedFunction BoundedFunction::constant(double c) {
  return {[c](std::span<const double>) { return c; }, std::abs(c)};
}

BoundedFunction BoundedFunction::clipped_square(double cap) {
  return {[cap](std::span<const double> x) { return std::min(x[0] * x[0], cap); }, cap};
}

double marginal_expectation(const TargetSpec& spec, const BoundedFunction& f, std::size_t k) {
  if (k == 0 || k > 3) throw ConfigError("marginal_expectation supports 1 <= k <= 3");
  if (k > spec.dim()) throw ConfigError("marginal_expectation: k exceeds the target dimension");
  if (!f.f || !std::isfinite(f.bound) || f.bound < 0.0) {
    throw ContractViolation("marginal_expectation: f must carry a finite sup-norm bound");
  }

  // Nested quadrature on kinked or slowly decaying integrands can need
  // billions of evaluations at k = 3; past this budget the call fails.
  constexpr std::size_t kEvaluationBudget = 100'000'000;
  std::size_t evaluations = 0;
  auto checked = [&](std::span<const double> x) {
    if (++evaluations > kEvaluationBudget) {
      throw NumericError("marginal_expectation: evaluation budget exhausted at k = " + std::to_string(k));
    }
    const double v = f(x);
    if (!(std::abs(v) <= f.bound)) {
      throw ContractViolation("marginal_expectation: |f| exceeded its declared bound");
    }
    return v;
  };
  const double kd = static_cast<double>(k);
  const double tol = 1e-10;
  quad::Options opts;
  opts.abs_tol = tol;
  opts.max_intervals = 20000;

  if (k == 1) {
    double log_c;
    std::function<double(double)> log_kernel;
    if (spec.heavy_tailed()) {
      const double nu = spec.nu();
      log_c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi);
      log_kernel = [nu](double x) { return -0.5 * (nu + 1.0) * std::log1p(x * x / nu); };
    } else {
      log_c = -0.5 * std::log(2.0 * std::numbers::pi);
      log_kernel = [](double x) { return -0.5 * x * x; };
    }
    const double inf = std::numeric_limits<double>::infinity();
    return quad::integrate(
               [&](double x) {
                 const double v = checked(std::span<const double>(&x, 1));
                 return v * std::exp(log_c + log_kernel(x));
               },
               -inf, inf, opts)
        .value;
  }

  // k = 2, 3: nested one-dimensional quadratures over R^k. Kinks of f stay at
  // fixed places in every axis, which keeps the error estimates honest.
  double log_c;
  std::function<double(double)> log_kernel;
  if (spec.heavy_tailed()) {
    const double nu = spec.nu();
    log_c = std::lgamma(0.5 * (nu + kd)) - std::lgamma(0.5 * nu) - 0.5 * kd * std::log(nu * std::numbers::pi);
    log_kernel = [nu, kd](double r2) { return -0.5 * (nu + kd) * std::log1p(r2 / nu); };
  } else {
    log_c = -0.5 * kd * std::log(2.0 * std::numbers::pi);
    log_kernel = [](double r2) { return -0.5 * r2; };
  }
  std::vector<double> point(k, 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  std::function<double(std::size_t)> level = [&](std::size_t axis) -> double {
    // Curved kinks (|x| = const) cut across every axis, so k = 2 takes extra
    // margin on each level. k = 3 cannot afford it.
    quad::Options o = opts;
    if (k == 2) o.abs_tol = tol * (axis == 0 ? 1e-2 : 1e-4);
    if (k == 3) o.abs_tol = tol * (axis == 0 ? 1.0 : 1e-2);
    return quad::integrate(
               [&, axis](double t) {
                 point[axis] = t;
                 if (axis + 1 < k) return level(axis + 1);
                 double r2 = 0.0;
                 for (double v : point) r2 += v * v;
                 return checked(point) * std::exp(log_c + log_kernel(r2));
               },
               -inf, inf, o)
        .value;
  };
  return level(0);
}

}  // namespace rwmlab
