#pragma once

// Closed forms and quadratures behind the acceptance-probability analysis:
// the limiting and finite-d acceptance functions, the law N_sigma of the log
// acceptance statistic, the coordinate law of the uniform distribution on the
// radius-sqrt(d) sphere, and the exchangeable-pair identities.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rwmlab/rng.hpp"
#include "rwmlab/stats.hpp"
#include "rwmlab/targets.hpp"

namespace rwmlab::analytic {

double normal_pdf(double x);
double normal_cdf(double x);
/// log Phi(x), accurate far into the lower tail.
double log_normal_cdf(double x);

// ---------------------------------------------------------------------------
// Acceptance functions

/// exp(-max(s, 0)).
double alpha_light(double s);

/// Density q^d of Z = |X|^2 / d under a target, together with the window
/// K_a = (1/a, a) on which uniform statements about z are made.
class HeavyAcceptanceCtx {
 public:
  /// Student-t(nu): Z ~ F(d, nu). Standard Gaussian: Z ~ chi^2_d / d.
  static HeavyAcceptanceCtx for_target(const TargetSpec& target, double a = 2.0);
  static HeavyAcceptanceCtx student_t(std::size_t d, double nu, double a = 2.0);
  static HeavyAcceptanceCtx gaussian(std::size_t d, double a = 2.0);

  std::size_t dim() const noexcept { return d_; }
  double window() const noexcept { return a_; }
  bool heavy_tailed() const noexcept { return nu_ > 0.0; }
  double nu() const noexcept { return nu_; }
  bool in_window(double z) const noexcept { return z > 1.0 / a_ && z < a_; }

  double log_qd(double z) const;
  double qd(double z) const;
  /// log q^d(z (1 + 2s/d)) - log q^d(z), without forming either term.
  double log_qd_shift(double z, double s) const;

 private:
  HeavyAcceptanceCtx(std::size_t d, double nu, double a);
  std::size_t d_;
  double nu_;  // 0 for the Gaussian case
  double a_;
};

/// alpha^d(s; z) = q^d(z(1 + 2s+/d)) / q^d(z) * (1 + 2s+/d)^{(2-d)/2}, in the
/// log domain. s is the acceptance statistic divided by z. Exactly 1 for s <= 0.
double alpha_heavy(const HeavyAcceptanceCtx& ctx, double s, double z);

struct HPair {
  double h = 0.0;   // s exp(-s+)
  double hd = 0.0;  // s alpha^d(s; z)
};
HPair h_and_hd(const HeavyAcceptanceCtx& ctx, double s, double z);

/// s in [-50, 50]: coarse on s < 0 (where h = h^d), step 1e-3 on (0, 10],
/// step 1e-2 on (10, 50].
std::vector<double> default_s_grid();
/// n log-spaced points strictly inside (1/a, a).
std::vector<double> default_z_grid(double a, std::size_t n = 401);

struct HdDeviation {
  double scaled = 0.0;   // d * max_grid |h^d - h|
  double max_abs = 0.0;  // max_grid |h^d - h|
  double s_at = 0.0;
  double z_at = 0.0;
  /// Bound on |h^d - h| for s > 50 (both terms are decreasing there), so the
  /// grid maximum is the supremum over R whenever tail_bound <= max_abs.
  double tail_bound = 0.0;
};

/// Grid reduction of d sup_{z in K_a} sup_{s in R} |h^d(s; z) - h(s)|. For
/// s <= 0 the two functions coincide. Throws ConfigError when a grid point
/// lies outside [-50, 50] x K_a.
HdDeviation hd_uniform_deviation(const HeavyAcceptanceCtx& ctx, std::span<const double> s_grid,
                                 std::span<const double> z_grid);

/// Student-t check that exp(min{0, log p(x+W) - log p(x)}) matches
/// min{1, alpha^d(S/z; z)} on random (x, W) pairs. Increments are Gaussian
/// with per-coordinate scale l / sqrt(d), l drawn log-uniformly in [0.25, 8].
struct ReconstructionReport {
  std::size_t n_pairs = 0;
  double max_rel_error = 0.0;
  double min_probability = 1.0;
};
ReconstructionReport alpha_reconstruction_check(const TargetSpec& target, std::size_t n_pairs,
                                                Rng& rng);

// ---------------------------------------------------------------------------
// N_sigma = N(sigma^2 / 2, sigma^2)

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
/// Mean and variance of N_sigma by quadrature.
Moments nsigma_moments(double sigma);

struct GirsanovSides {
  double lhs = 0.0;  // E[f(S); S < 0]
  double rhs = 0.0;  // E[f(-S) exp(-S); S > 0]
  double residual = 0.0;
};
GirsanovSides girsanov_sides(double sigma, const std::function<double(double)>& f);
double girsanov_residual(double sigma, const std::function<double(double)>& f);

struct NamedFunction {
  std::string name;
  std::function<double(double)> f;
};
/// 1, cos, tanh, 1/(1+s^2), min(s^2, 10).
std::vector<NamedFunction> girsanov_battery();

/// mu_k(sigma) = E[|S|^k exp(-S+)]: closed form for k in {0, 1}, quadrature
/// otherwise. Throws DomainError for sigma <= 0 or k < 0.
double mu_k(double sigma, int k);
double mu_k_quadrature(double sigma, int k);

/// E[S exp(-S+)] under N_sigma by quadrature (zero in exact arithmetic).
double nsigma_h_expectation(double sigma);

/// log(sigma^2 mu_0(sigma)) on sigma = 2^j, j = j_lo..j_hi.
struct GridProfile {
  std::vector<double> sigma;
  std::vector<double> log_value;
  std::size_t argmax = 0;
  bool interior = false;          // argmax is not an end point
  bool decreasing_after = false;  // strictly decreasing past the argmax
};
GridProfile sigma2_mu0_profile(int j_lo = -10, int j_hi = 20);

// ---------------------------------------------------------------------------
// Coordinate law of the uniform distribution on {|x|^2 = d}

/// f_d(u) = (1 - u^2/d)^{(d-3)/2} / (sqrt(d) B(1/2, (d-1)/2)) on (-sqrt d, sqrt d).
double sphere_marginal_log_density(std::size_t d, double u);
double sphere_marginal_density(std::size_t d, double u);
double sphere_marginal_cdf(std::size_t d, double u);
/// Quadrature of f_d over its support (u = sqrt(d) sin(theta) removes the
/// endpoint singularity at d = 2).
double sphere_marginal_total_mass(std::size_t d);
Moments sphere_marginal_moments(std::size_t d);
/// E|U|^p = d^{p/2} B((p+1)/2, (d-1)/2) / B(1/2, (d-1)/2), p > -1.
double sphere_marginal_moment(std::size_t d, double p);
/// sqrt(d) X_1 / |X| with X ~ N_d(0, I).
double sample_sphere_marginal(std::size_t d, Rng& rng);

enum class Metric { TV, W1 };
/// TV = (1/2) int |f_d - phi|; W1 = int |F_d - Phi|. Both by quadrature
/// split at the sign changes of the difference.
double sphere_marginal_distance(std::size_t d, Metric metric);
/// 8/(d-4) for TV (d >= 5), 3/(d-1) for W1.
double diaconis_bound(std::size_t d, Metric metric);

/// KS test of U^2/d against Beta(1/2, (d-1)/2) at level 0.99.
stats::KsResult beta_law_check(std::size_t d, std::size_t n_samples, Rng& rng);
/// Same test on supplied values of U.
stats::KsResult beta_law_check(std::size_t d, std::span<const double> u_samples);

// ---------------------------------------------------------------------------
// Exchangeable pairs on a finite support

struct DiscreteJoint {
  std::vector<double> support;  // points x_1..x_n
  std::vector<double> prob;     // row-major n x n table of P(X = x_i, Y = x_j)
};

/// Random symmetric table on n points with distinct support values.
/// with_diagonal = false puts no mass on X = Y.
DiscreteJoint random_symmetric_joint(std::size_t n, Rng& rng, bool with_diagonal);

struct ExchangeableResult {
  bool exchangeable = false;
  // E f(X) = (1/2) E[f(X) + f(Y)]
  double lhs1 = 0.0, rhs1 = 0.0, residual1 = 0.0;
  // (1/2) E|f(X) - f(Y)| = 2 E[f(X) (1/2 - P(f(X) < f(Y) | X))]
  double lhs2 = 0.0, rhs2 = 0.0, residual2 = 0.0;
  /// E[f(X); f(X) = f(Y)]. rhs2 - lhs2 equals this term exactly, so the
  /// second identity needs f(X) != f(Y) almost surely (or f = 0 on ties).
  double tie_term = 0.0;
  std::string message;
};
/// Evaluates both sides by enumeration. A table that is not symmetric (or not
/// a probability table) yields exchangeable = false and a message.
ExchangeableResult exchangeable_pair_check(const DiscreteJoint& joint,
                                           const std::function<double(double)>& f);

}  // namespace rwmlab::analytic
