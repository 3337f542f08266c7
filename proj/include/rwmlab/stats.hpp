#pragma once

// Small statistical toolkit shared by the samplers' self-checks and the
// diagnostics: Kolmogorov-Smirnov tests, batch-means standard errors, and the
// null law used by the sign-flip symmetry test.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rwmlab::stats {

double mean(std::span<const double> xs);
/// Unbiased sample variance.
double variance(std::span<const double> xs);
/// Median; copies its input.
double median(std::span<const double> xs);

/// P(K > x) for the Kolmogorov distribution K = sup |B_bridge|.
double kolmogorov_survival(double x);
/// Quantile of K at probability p (e.g. 0.99).
double kolmogorov_quantile(double p);

/// P(sup_{0<=t<=1} |B_t| <= x) for standard Brownian motion.
double sup_abs_brownian_cdf(double x);
double sup_abs_brownian_quantile(double p);

struct KsResult {
  double statistic = 0.0;  // sup |F_n - F|
  double scaled = 0.0;     // sqrt(n_eff) * statistic
  double critical = 0.0;   // 99% critical value for `statistic`
  double p_value = 1.0;    // asymptotic
  bool pass = true;        // statistic below critical
};

/// One-sample KS test against a continuous CDF at the given level.
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf,
                       double level = 0.99);

/// Two-sample KS test at the given level.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double level = 0.99);

/// Batch-means standard error of the mean of a stationary series, using
/// floor(sqrt(n)) batches of equal length (trailing remainder dropped).
double batch_means_se(std::span<const double> xs);

/// Ordinary least squares y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_max = 0.0;
};
LineFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace rwmlab::stats
