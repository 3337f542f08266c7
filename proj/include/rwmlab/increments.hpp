#pragma once

// Increment laws Gamma^d for the random-walk proposal x* = x + W. Every family
// is symmetric about the origin. The per-coordinate scale is l * d^{-gamma},
// so gamma = 1/2 with the Gaussian family gives N_d(0, l^2 I_d / d).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rwmlab/rng.hpp"

namespace rwmlab {

enum class IncrementFamily { GaussianIso, StudentTIso, StableIso, CoordinateGaussian, SphericalShell };

/// Config name ("gaussian_iso", "student_t_iso", ...) <-> enum.
std::string family_name(IncrementFamily family);
IncrementFamily family_from_name(const std::string& name);

struct IncrementSpec {
  IncrementFamily family = IncrementFamily::GaussianIso;
  double l = 2.38;
  double gamma = 0.5;
  double df = 0.0;      // StudentTIso
  double alpha = 2.0;   // StableIso, in (0, 2]
  double p_move = 1.0;  // CoordinateGaussian, in (0, 1]

  /// Throws ConfigError listing the offending parameter.
  void validate() const;

  /// Per-coordinate scale l * d^{-gamma}.
  double scale(std::size_t d) const;

  std::string describe() const;

  static IncrementSpec gaussian(double l, double gamma) {
    return {IncrementFamily::GaussianIso, l, gamma};
  }
};

/// Shape of one drawn increment. The kernel uses it to skip O(d) work when
/// the draw is zero or touches a single coordinate.
struct IncrementSupport {
  enum class Kind { Dense, Single, Zero } kind = Kind::Dense;
  std::size_t index = 0;  // Single: the moved coordinate
};

/// Sampler bound to one (spec, d) pair; holds no per-draw state.
class IncrementSampler {
 public:
  IncrementSampler(IncrementSpec spec, std::size_t d);

  /// Writes one draw of W into `out` (length d). For Single/Zero supports
  /// only the reported coordinate is meaningful; the rest are left as 0.
  IncrementSupport draw(Rng& rng, std::span<double> out) const;

  const IncrementSpec& spec() const noexcept { return spec_; }
  std::size_t dim() const noexcept { return d_; }
  double coordinate_scale() const noexcept { return scale_; }

 private:
  IncrementSpec spec_;
  std::size_t d_;
  double scale_;
};

/// One draw W ~ Gamma^d as a dense vector.
std::vector<double> sample_increment(const IncrementSpec& spec, std::size_t d, Rng& rng);

/// Symmetric alpha-stable variate (beta = 0, unit scale) by the
/// Chambers-Mallows-Stuck transform of V ~ U(-pi/2, pi/2), E ~ Exp(1).
double cms_symmetric_stable(double alpha, double v, double e);
double sample_symmetric_stable(double alpha, Rng& rng);

/// Result of the sign-flip symmetry check.
struct SymmetryReport {
  std::size_t n_samples = 0;
  std::size_t n_directions = 0;
  double max_discrepancy = 0.0;  // max over directions of sqrt(n) * D_n
  double critical = 0.0;         // Bonferroni-corrected 99% critical value
  bool pass = true;
};

using VectorSampler = std::function<void(Rng&, std::span<double>)>;

/// Compares {W_i} with {-W_i} along random unit directions. Along direction
/// u the statistic is D_n = sup_t |F_n(t) + F_n(-t) - 1| for the projections
/// <W_i, u>; under symmetry sqrt(n) D_n converges to sup_{[0,1]} |B| (the
/// signs are iid +-1 given the magnitudes), which sets the critical value.
SymmetryReport flip_symmetry_check(const VectorSampler& sampler, std::size_t d,
                                   std::size_t n_samples, Rng& rng,
                                   std::size_t n_directions = 16);
SymmetryReport flip_symmetry_check(const IncrementSpec& spec, std::size_t d,
                                   std::size_t n_samples, Rng& rng,
                                   std::size_t n_directions = 16);

}  // namespace rwmlab
