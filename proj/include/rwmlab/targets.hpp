#pragma once

// Target laws P^d: the standard Gaussian and scale mixtures of normals,
//   X | Y ~ N_d(0, Y I_d),  Y ~ Q.
// With Q = InverseGamma(nu/2, nu/2) the mixture is the multivariate Student-t
// with nu degrees of freedom, which has a closed-form density.
//
// Log-densities are returned up to an additive constant that is fixed per
// spec; the Metropolis kernel only ever consumes differences.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwmlab/rng.hpp"

namespace rwmlab {

enum class MixingKind { Dirac1, InverseGamma };

/// Mixing law Q of the radial scale Y.
struct MixingLaw {
  MixingKind kind = MixingKind::Dirac1;
  double nu = 0.0;  // InverseGamma only

  static MixingLaw dirac1() { return {}; }
  static MixingLaw inverse_gamma(double nu);

  /// Density q(y) and its derivative; InverseGamma only.
  double density(double y) const;
  double density_derivative(double y) const;
  double log_density(double y) const;

  double sample(Rng& rng) const;
};

enum class TargetKind { StandardGaussian, ScaleMixture };

class TargetSpec {
 public:
  static TargetSpec standard_gaussian(std::size_t dim);
  static TargetSpec scale_mixture(std::size_t dim, MixingLaw mixing);
  static TargetSpec student_t(std::size_t dim, double nu) {
    return scale_mixture(dim, MixingLaw::inverse_gamma(nu));
  }

  TargetKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::optional<MixingLaw>& mixing() const noexcept { return mixing_; }

  /// True for a scale mixture with a density-bearing Q (heavy-tailed case).
  bool heavy_tailed() const noexcept {
    return mixing_ && mixing_->kind == MixingKind::InverseGamma;
  }
  /// Degrees of freedom for Student-t targets, 0 otherwise.
  double nu() const noexcept { return heavy_tailed() ? mixing_->nu : 0.0; }

  TargetSpec with_dim(std::size_t dim) const;

  /// log p^d(x) + const. Throws DomainError for non-finite input and for the
  /// zero vector under a scale mixture.
  double log_density(std::span<const double> x) const;

  /// log p^d as a function of r2 = |x|^2 (same constant as log_density).
  /// Defined at r2 = 0 as the continuous extension.
  double log_density_radial(double norm_sq) const;

  /// Exact draw X ~ P^d.
  void sample_stationary(Rng& rng, std::span<double> out) const;
  std::vector<double> sample_stationary(Rng& rng) const;

  /// Canonical text form; stable across runs, used for stream derivation.
  std::string describe() const;

  /// Config-facing kind name: "gaussian" or "student_t".
  std::string kind_name() const;

 private:
  TargetSpec(TargetKind kind, std::size_t dim, std::optional<MixingLaw> mixing)
      : kind_(kind), dim_(dim), mixing_(mixing) {}

  TargetKind kind_;
  std::size_t dim_;
  std::optional<MixingLaw> mixing_;
};

/// A test function R^k -> R with a declared sup-norm bound. The bound is
/// enforced at every evaluation made by marginal_expectation.
struct BoundedFunction {
  std::function<double(std::span<const double>)> f;
  double bound = 0.0;

  double operator()(std::span<const double> x) const { return f(x); }

  static BoundedFunction constant(double c);
  /// min(x_1^2, cap): the bounded functional used throughout the diagnostics.
  static BoundedFunction clipped_square(double cap = 10.0);
};

/// E[f(X_1, ..., X_k)] under P^d for k <= 3, by deterministic quadrature on
/// the exact k-dimensional marginal (Gaussian, or k-variate Student-t).
/// Absolute accuracy 1e-8. k = 2, 3 nest one-dimensional rules. Kinked f at
/// k = 3, or oscillating f against a heavy tail, can exhaust the evaluation
/// budget; that raises NumericError instead of returning a truncated value.
double marginal_expectation(const TargetSpec& spec, const BoundedFunction& f, std::size_t k);

}  // namespace rwmlab
