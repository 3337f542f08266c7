#include "rwmlab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>

#include "rwmlab/error.hpp"
#include "rwmlab/quadrature.hpp"

namespace rwmlab::analytic {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive and finite");
}

void require_sphere_dim(std::size_t d) {
  if (d < 2) throw DomainError("sphere marginal needs d >= 2");
}

// Integral over S ~ N_sigma of g_neg(s) on {s < 0} plus exp(log_w(s)) * g_pos(s)
// on {s > 0}, in the standardized variable u = (s - sigma^2/2) / sigma. The
// split point is u0 = -sigma/2. The positive-side weight exp(-s) is folded
// into the Gaussian exponent so that nothing overflows for large sigma.
struct SplitIntegral {
  double negative = 0.0;
  double positive = 0.0;
};

SplitIntegral nsigma_split(double sigma, const std::function<double(double)>& g_neg,
                           const std::function<double(double)>& g_pos, bool tilt_positive) {
  const double m = 0.5 * sigma * sigma;
  const double u0 = -0.5 * sigma;
  auto neg = [&](double u) {
    const double s = m + sigma * u;
    return g_neg(s) * std::exp(-0.5 * u * u - kLogSqrt2Pi);
  };
  auto pos = [&](double u) {
    const double s = m + sigma * u;
    const double log_w = -0.5 * u * u - kLogSqrt2Pi - (tilt_positive ? s : 0.0);
    const double w = std::exp(log_w);
    return w == 0.0 ? 0.0 : g_pos(s) * w;
  };
  quad::Options opts;
  opts.max_intervals = 20000;
  return {quad::integral(neg, -kInf, u0, opts), quad::integral(pos, u0, kInf, opts)};
}

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double normal_cdf(double x) { return 0.5 * boost::math::erfc(-x / std::numbers::sqrt2); }

double log_normal_cdf(double x) {
  if (x > -30.0) return std::log(normal_cdf(x));
  // Mills-ratio expansion: Phi(x) = phi(x)/|x| (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8 - ...).
  const double r = 1.0 / (x * x);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
  return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

double alpha_light(double s) { return std::exp(-std::max(s, 0.0)); }

// ---------------------------------------------------------------------------

HeavyAcceptanceCtx::HeavyAcceptanceCtx(std::size_t d, double nu, double a) : d_(d), nu_(nu), a_(a) {
  if (d == 0) throw ConfigError("acceptance context needs d >= 1");
  if (!(a > 1.0) || !std::isfinite(a)) throw ConfigError("window parameter a must exceed 1");
}

HeavyAcceptanceCtx HeavyAcceptanceCtx::student_t(std::size_t d, double nu, double a) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("student-t context needs nu > 0");
  return {d, nu, a};
}

HeavyAcceptanceCtx HeavyAcceptanceCtx::gaussian(std::size_t d, double a) { return {d, 0.0, a}; }

HeavyAcceptanceCtx HeavyAcceptanceCtx::for_target(const TargetSpec& target, double a) {
  if (target.heavy_tailed()) return student_t(target.dim(), target.nu(), a);
  return gaussian(target.dim(), a);
}

double HeavyAcceptanceCtx::log_qd(double z) const {
  if (!(z > 0.0)) return -kInf;
  const double d = static_cast<double>(d_);
  if (heavy_tailed()) {
    // F(d, nu) density.
    return 0.5 * d * std::log(d / nu_) + (0.5 * d - 1.0) * std::log(z) -
           0.5 * (d + nu_) * std::log1p(d * z / nu_) - log_beta(0.5 * d, 0.5 * nu_);
  }
  // chi^2_d / d density.
  return std::log(d) + (0.5 * d - 1.0) * std::log(d * z) - 0.5 * d * z - 0.5 * d * std::numbers::ln2 -
         std::lgamma(0.5 * d);
}

double HeavyAcceptanceCtx::qd(double z) const { return std::exp(log_qd(z)); }

double HeavyAcceptanceCtx::log_qd_shift(double z, double s) const {
  const double d = static_cast<double>(d_);
  const double log_t = std::log1p(2.0 * s / d);
  if (heavy_tailed()) {
    return (0.5 * d - 1.0) * log_t - 0.5 * (d + nu_) * std::log1p(2.0 * s * z / (nu_ + d * z));
  }
  return (0.5 * d - 1.0) * log_t - s * z;
}

double alpha_heavy(const HeavyAcceptanceCtx& ctx, double s, double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("alpha_heavy: z must be positive");
  if (std::isnan(s)) throw DomainError("alpha_heavy: s is NaN");
  if (s <= 0.0) return 1.0;
  if (std::isinf(s)) return 0.0;
  const double d = static_cast<double>(ctx.dim());
  const double log_alpha = ctx.log_qd_shift(z, s) + 0.5 * (2.0 - d) * std::log1p(2.0 * s / d);
  return std::exp(log_alpha);
}

HPair h_and_hd(const HeavyAcceptanceCtx& ctx, double s, double z) {
  return {s * alpha_light(s), s * alpha_heavy(ctx, s, z)};
}

std::vector<double> default_s_grid() {
  std::vector<double> s;
  for (int i = -100; i < 0; ++i) s.push_back(0.5 * i);
  for (int i = 0; i <= 10000; ++i) s.push_back(1e-3 * i);
  for (int i = 1; i <= 4000; ++i) s.push_back(10.0 + 1e-2 * i);
  return s;
}

std::vector<double> default_z_grid(double a, std::size_t n) {
  if (!(a > 1.0)) throw ConfigError("z grid needs a > 1");
  if (n == 0) throw ConfigError("z grid needs at least one point");
  std::vector<double> z(n);
  const double log_a = std::log(a);
  for (std::size_t i = 0; i < n; ++i) {
    const double frac = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    z[i] = std::exp(log_a * (2.0 * frac - 1.0));
  }
  return z;
}

HdDeviation hd_uniform_deviation(const HeavyAcceptanceCtx& ctx, std::span<const double> s_grid,
                                 std::span<const double> z_grid) {
  if (s_grid.empty() || z_grid.empty()) throw ConfigError("hd_uniform_deviation: empty grid");
  for (double s : s_grid) {
    if (!(s >= -50.0 && s <= 50.0)) throw ConfigError("hd_uniform_deviation: s grid leaves [-50, 50]");
  }
  for (double z : z_grid) {
    if (!ctx.in_window(z)) throw ConfigError("hd_uniform_deviation: z grid leaves (1/a, a)");
  }
  const double d = static_cast<double>(ctx.dim());
  HdDeviation out;
  for (double z : z_grid) {
    for (double s : s_grid) {
      if (s <= 0.0) continue;  // h = h^d = s
      const HPair p = h_and_hd(ctx, s, z);
      const double diff = std::abs(p.hd - p.h);
      if (diff > out.max_abs) {
        out.max_abs = diff;
        out.s_at = s;
        out.z_at = z;
      }
    }
    // For s > 50: |h^d - h| <= s alpha^d(s; z) + s e^{-s}. Both terms decrease
    // past s = 1, and s alpha^d(s; z) past (nu + d z) / (z (d + nu - 2)) (resp.
    // 1/z for the Gaussian law), which lies below 50 when the window is sane.
    const double turn = ctx.heavy_tailed()
                            ? (ctx.nu() + d * z) / (z * (d + ctx.nu() - 2.0))
                            : 1.0 / z;
    if (!(turn > 0.0 && turn < 50.0)) {
      throw ConfigError("hd_uniform_deviation: tail bound not valid for this window");
    }
    const double tail = 50.0 * alpha_heavy(ctx, 50.0, z) + 50.0 * std::exp(-50.0);
    out.tail_bound = std::max(out.tail_bound, tail);
  }
  out.scaled = d * out.max_abs;
  return out;
}

ReconstructionReport alpha_reconstruction_check(const TargetSpec& target, std::size_t n_pairs,
                                                Rng& rng) {
  if (!target.heavy_tailed()) throw ConfigError("alpha reconstruction needs a Student-t target");
  const HeavyAcceptanceCtx ctx = HeavyAcceptanceCtx::for_target(target);
  const std::size_t d = target.dim();
  const double dd = static_cast<double>(d);
  ReconstructionReport report;
  report.n_pairs = n_pairs;
  std::vector<double> x(d), xw(d);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    target.sample_stationary(rng, x);
    const double l = std::exp(std::log(0.25) + rng.uniform_open() * std::log(32.0));
    const double scale = l / std::sqrt(dd);
    double norm_sq = 0.0, dot = 0.0, w_sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double w = scale * rng.normal();
      norm_sq += x[k] * x[k];
      dot += x[k] * w;
      w_sq += w * w;
      xw[k] = x[k] + w;
    }
    const double delta = target.log_density(xw) - target.log_density(x);
    const double generic = std::exp(std::min(0.0, delta));
    const double z = norm_sq / dd;
    const double s = (dot + 0.5 * w_sq) / z;
    const double formula = std::min(1.0, alpha_heavy(ctx, s, z));
    const double rel = std::abs(generic - formula) / std::max(formula, std::numeric_limits<double>::min());
    report.max_rel_error = std::max(report.max_rel_error, rel);
    report.min_probability = std::min(report.min_probability, formula);
  }
  return report;
}

// ---------------------------------------------------------------------------

Moments nsigma_moments(double sigma) {
  require_sigma(sigma);
  const double m = 0.5 * sigma * sigma;
  quad::Options opts;
  opts.max_intervals = 20000;
  // Raw moments in u, mapped back: S = m + sigma U.
  auto weight = [](double u) { return std::exp(-0.5 * u * u - kLogSqrt2Pi); };
  const double e1 = quad::integral([&](double u) { return (m + sigma * u) * weight(u); }, -kInf, kInf, opts);
  const double e2 = quad::integral(
      [&](double u) {
        const double c = m + sigma * u - e1;
        return c * c * weight(u);
      },
      -kInf, kInf, opts);
  return {e1, e2};
}

GirsanovSides girsanov_sides(double sigma, const std::function<double(double)>& f) {
  require_sigma(sigma);
  const SplitIntegral parts = nsigma_split(
      sigma, [&](double s) { return f(s); }, [&](double s) { return f(-s); }, true);
  return {parts.negative, parts.positive, std::abs(parts.negative - parts.positive)};
}

double girsanov_residual(double sigma, const std::function<double(double)>& f) {
  return girsanov_sides(sigma, f).residual;
}

std::vector<NamedFunction> girsanov_battery() {
  return {
      {"one", [](double) { return 1.0; }},
      {"cos", [](double s) { return std::cos(s); }},
      {"tanh", [](double s) { return std::tanh(s); }},
      {"cauchy_kernel", [](double s) { return 1.0 / (1.0 + s * s); }},
      {"clipped_square", [](double s) { return std::min(s * s, 10.0); }},
  };
}

double mu_k_quadrature(double sigma, int k) {
  require_sigma(sigma);
  if (k < 0) throw DomainError("mu_k needs k >= 0");
  auto power = [k](double s) { return k == 0 ? 1.0 : std::pow(std::abs(s), k); };
  const SplitIntegral parts = nsigma_split(sigma, power, power, true);
  return parts.negative + parts.positive;
}

double mu_k(double sigma, int k) {
  require_sigma(sigma);
  if (k < 0) throw DomainError("mu_k needs k >= 0");
  if (k == 0) return 2.0 * normal_cdf(-0.5 * sigma);
  if (k == 1) {
    return -sigma * sigma * normal_cdf(-0.5 * sigma) + 2.0 * sigma * normal_pdf(0.5 * sigma);
  }
  return mu_k_quadrature(sigma, k);
}

double nsigma_h_expectation(double sigma) {
  require_sigma(sigma);
  const auto id = [](double s) { return s; };
  const SplitIntegral parts = nsigma_split(sigma, id, id, true);
  return parts.negative + parts.positive;
}

GridProfile sigma2_mu0_profile(int j_lo, int j_hi) {
  if (j_hi - j_lo < 2) throw ConfigError("sigma grid needs at least three points");
  GridProfile p;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double sigma = std::ldexp(1.0, j);
    p.sigma.push_back(sigma);
    p.log_value.push_back(2.0 * std::log(sigma) + std::numbers::ln2 + log_normal_cdf(-0.5 * sigma));
  }
  p.argmax = static_cast<std::size_t>(
      std::max_element(p.log_value.begin(), p.log_value.end()) - p.log_value.begin());
  p.interior = p.argmax > 0 && p.argmax + 1 < p.log_value.size();
  p.decreasing_after = true;
  for (std::size_t i = p.argmax + 1; i < p.log_value.size(); ++i) {
    if (!(p.log_value[i] < p.log_value[i - 1])) p.decreasing_after = false;
  }
  return p;
}

// ---------------------------------------------------------------------------

double sphere_marginal_log_density(std::size_t d, double u) {
  require_sphere_dim(d);
  const double dd = static_cast<double>(d);
  if (!(std::abs(u) < std::sqrt(dd))) return -kInf;
  return 0.5 * (dd - 3.0) * std::log1p(-u * u / dd) - 0.5 * std::log(dd) -
         log_beta(0.5, 0.5 * (dd - 1.0));
}

double sphere_marginal_density(std::size_t d, double u) {
  return std::exp(sphere_marginal_log_density(d, u));
}

double sphere_marginal_cdf(std::size_t d, double u) {
  require_sphere_dim(d);
  const double dd = static_cast<double>(d);
  const double r = std::sqrt(dd);
  if (u <= -r) return 0.0;
  if (u >= r) return 1.0;
  const double half = 0.5 * boost::math::ibeta(0.5, 0.5 * (dd - 1.0), u * u / dd);
  return u >= 0.0 ? 0.5 + half : 0.5 - half;
}

namespace {

// f_d(sqrt(d) sin t) sqrt(d) cos t = cos(t)^{d-2} / B(1/2, (d-1)/2).
double sphere_theta_density(std::size_t d, double t) {
  const double dd = static_cast<double>(d);
  const double c = std::cos(t);
  if (c <= 0.0) return d == 2 ? 1.0 / std::numbers::pi : 0.0;
  return std::exp((dd - 2.0) * std::log(c) - log_beta(0.5, 0.5 * (dd - 1.0)));
}

// The theta-density has width about 1/sqrt(d) around 0; breakpoints at
// multiples of that width keep the rule from stepping over the mass.
std::vector<double> theta_scale_breaks(std::size_t d, double hi) {
  const double w = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> out;
  for (double k : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    if (k * w < hi) out.push_back(k * w);
  }
  return out;
}

double integrate_with_breaks(const std::function<double(double)>& g, double lo, double hi,
                             std::vector<double> breaks);

double integrate_theta(std::size_t d, const std::function<double(double)>& g_of_u) {
  const double r = std::sqrt(static_cast<double>(d));
  const double half_pi = 0.5 * std::numbers::pi;
  auto integrand = [&](double t) { return g_of_u(r * std::sin(t)) * sphere_theta_density(d, t); };
  std::vector<double> breaks{0.0};
  for (double b : theta_scale_breaks(d, half_pi)) {
    breaks.push_back(b);
    breaks.push_back(-b);
  }
  return integrate_with_breaks(integrand, -half_pi, half_pi, breaks);
}

// Sign changes of g on (lo, hi) located on a uniform scan and refined by TOMS 748.
std::vector<double> sign_changes(const std::function<double(double)>& g, double lo, double hi,
                                 std::size_t n_scan) {
  std::vector<double> roots;
  double x_prev = lo;
  double g_prev = g(lo);
  for (std::size_t i = 1; i <= n_scan; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_scan);
    const double gx = g(x);
    if (gx == 0.0) continue;  // no sign information (both terms underflowed)
    if (g_prev != 0.0 && (g_prev < 0.0) != (gx < 0.0)) {
      std::uintmax_t iters = 200;
      const auto bracket = boost::math::tools::toms748_solve(
          g, x_prev, x, g_prev, gx, boost::math::tools::eps_tolerance<double>(50), iters);
      roots.push_back(0.5 * (bracket.first + bracket.second));
    }
    x_prev = x;
    g_prev = gx;
  }
  return roots;
}

double integrate_with_breaks(const std::function<double(double)>& g, double lo, double hi,
                             std::vector<double> breaks) {
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> cuts{lo};
  for (double b : breaks) {
    if (b > cuts.back() && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  quad::Options opts;
  opts.max_intervals = 20000;
  opts.abs_tol = 1e-10 / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += quad::integral(g, cuts[i], cuts[i + 1], opts);
  return total;
}

}  // namespace

double sphere_marginal_total_mass(std::size_t d) {
  require_sphere_dim(d);
  return integrate_theta(d, [](double) { return 1.0; });
}

Moments sphere_marginal_moments(std::size_t d) {
  require_sphere_dim(d);
  const double mean = integrate_theta(d, [](double u) { return u; });
  const double var = integrate_theta(d, [mean](double u) { return (u - mean) * (u - mean); });
  return {mean, var};
}

double sphere_marginal_moment(std::size_t d, double p) {
  require_sphere_dim(d);
  if (!(p > -1.0) || !std::isfinite(p)) throw DomainError("sphere moment needs p > -1");
  const double dd = static_cast<double>(d);
  const double b = 0.5 * (dd - 1.0);
  return std::exp(0.5 * p * std::log(dd) + log_beta(0.5 * (p + 1.0), b) - log_beta(0.5, b));
}

double sample_sphere_marginal(std::size_t d, Rng& rng) {
  require_sphere_dim(d);
  const double x1 = rng.normal();
  double norm_sq = x1 * x1;
  for (std::size_t k = 1; k < d; ++k) {
    const double g = rng.normal();
    norm_sq += g * g;
  }
  return std::sqrt(static_cast<double>(d)) * x1 / std::sqrt(norm_sq);
}

double sphere_marginal_distance(std::size_t d, Metric metric) {
  require_sphere_dim(d);
  const double r = std::sqrt(static_cast<double>(d));
  if (metric == Metric::TV) {
    // By symmetry TV = int_0^{sqrt d} |f_d - phi| + Phi(-sqrt d); the first
    // integral is taken in theta where f_d du = cos^{d-2}(t) dt / B.
    auto diff = [&](double t) {
      const double u = r * std::sin(t);
      return sphere_theta_density(d, t) - normal_pdf(u) * r * std::cos(t);
    };
    const double half_pi = 0.5 * std::numbers::pi;
    auto roots = sign_changes(diff, 0.0, half_pi, 4000);
    for (double b : theta_scale_breaks(d, half_pi)) roots.push_back(b);
    auto abs_diff = [&](double t) { return std::abs(diff(t)); };
    return integrate_with_breaks(abs_diff, 0.0, half_pi, roots) + normal_cdf(-r);
  }
  // W1 = 2 (int_0^{sqrt d} |F_d - Phi| + int_{sqrt d}^inf Phi(-u) du).
  auto diff = [&](double u) { return sphere_marginal_cdf(d, u) - normal_cdf(u); };
  auto roots = sign_changes(diff, 0.0, r, 4000);
  for (double b : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) roots.push_back(b);
  auto abs_diff = [&](double u) { return std::abs(diff(u)); };
  const double inner = integrate_with_breaks(abs_diff, 0.0, r, roots);
  const double tail = normal_pdf(r) - r * normal_cdf(-r);
  return 2.0 * (inner + tail);
}

double diaconis_bound(std::size_t d, Metric metric) {
  const double dd = static_cast<double>(d);
  if (metric == Metric::TV) {
    if (d < 5) throw DomainError("TV bound needs d >= 5");
    return 8.0 / (dd - 4.0);
  }
  if (d < 2) throw DomainError("W1 bound needs d >= 2");
  return 3.0 / (dd - 1.0);
}

stats::KsResult beta_law_check(std::size_t d, std::span<const double> u_samples) {
  require_sphere_dim(d);
  const double dd = static_cast<double>(d);
  std::vector<double> v(u_samples.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = u_samples[i] * u_samples[i] / dd;
  const boost::math::beta_distribution<double> law(0.5, 0.5 * (dd - 1.0));
  return stats::ks_one_sample(std::move(v), [&](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::cdf(law, x);
  });
}

stats::KsResult beta_law_check(std::size_t d, std::size_t n_samples, Rng& rng) {
  std::vector<double> u(n_samples);
  for (double& x : u) x = sample_sphere_marginal(d, rng);
  return beta_law_check(d, u);
}

// ---------------------------------------------------------------------------

DiscreteJoint random_symmetric_joint(std::size_t n, Rng& rng, bool with_diagonal) {
  if (n < 2) throw ConfigError("random_symmetric_joint needs n >= 2");
  DiscreteJoint joint;
  joint.support.resize(n);
  // Distinct points: a sorted random walk with strictly positive gaps.
  double x = rng.normal();
  for (auto& s : joint.support) {
    s = x;
    x += 0.1 + rng.uniform_open();
  }
  joint.prob.assign(n * n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (i == j && !with_diagonal) continue;
      const double w = rng.uniform_open();
      joint.prob[i * n + j] = w;
      joint.prob[j * n + i] = w;
      total += i == j ? w : 2.0 * w;
    }
  }
  for (double& p : joint.prob) p /= total;
  return joint;
}

ExchangeableResult exchangeable_pair_check(const DiscreteJoint& joint,
                                           const std::function<double(double)>& f) {
  ExchangeableResult out;
  const std::size_t n = joint.support.size();
  if (n == 0 || joint.prob.size() != n * n) {
    out.message = "table shape does not match the support";
    return out;
  }
  double mass = 0.0;
  for (double p : joint.prob) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      out.message = "table has a negative or non-finite entry";
      return out;
    }
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-12) {
    out.message = "table does not sum to 1";
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (joint.prob[i * n + j] != joint.prob[j * n + i]) {
        std::ostringstream msg;
        msg << "not exchangeable: P(" << i << "," << j << ") != P(" << j << "," << i << ")";
        out.message = msg.str();
        return out;
      }
    }
  }
  out.exchangeable = true;

  std::vector<double> fx(n), px(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) fx[i] = f(joint.support[i]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) px[i] += joint.prob[i * n + j];
  }

  double ef = 0.0, half_sum = 0.0, half_abs = 0.0, rhs2 = 0.0, tie = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ef += px[i] * fx[i];
    double p_less = 0.0;  // P(f(X) < f(Y), X = x_i)
    for (std::size_t j = 0; j < n; ++j) {
      const double p = joint.prob[i * n + j];
      half_sum += 0.5 * p * (fx[i] + fx[j]);
      half_abs += 0.5 * p * std::abs(fx[i] - fx[j]);
      if (fx[i] < fx[j]) p_less += p;
      if (fx[i] == fx[j]) tie += p * fx[i];
    }
    rhs2 += 2.0 * fx[i] * (0.5 * px[i] - p_less);
  }
  out.lhs1 = ef;
  out.rhs1 = half_sum;
  out.residual1 = std::abs(ef - half_sum);
  out.lhs2 = half_abs;
  out.rhs2 = rhs2;
  out.residual2 = std::abs(half_abs - rhs2);
  out.tie_term = tie;
  return out;
}

}  // namespace rwmlab::analytic
