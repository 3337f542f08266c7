#include "rwmlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rwmlab/error.hpp"

namespace rwmlab::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty series");
  // Kahan summation; chains run to 10^7 steps.
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance needs at least two values");
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

double median(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of empty series");
  std::vector<double> v(xs.begin(), xs.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) {
    // Series converges slowly here; the CDF is numerically 0.
    return 1.0;
  }
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double bisect_quantile(const std::function<double(double)>& cdf, double p, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double kolmogorov_quantile(double p) {
  return bisect_quantile([](double x) { return 1.0 - kolmogorov_survival(x); }, p, 0.2, 10.0);
}

double sup_abs_brownian_cdf(double x) {
  if (x <= 0.0) return 0.0;
  // P(sup|B| < x) = (4/pi) sum_k (-1)^k/(2k+1) exp(-pi^2 (2k+1)^2 / (8 x^2))
  constexpr double pi = std::numbers::pi;
  double sum = 0.0;
  for (int k = 0; k < 400; ++k) {
    const double m = 2.0 * k + 1.0;
    const double term = std::exp(-pi * pi * m * m / (8.0 * x * x)) / m;
    sum += (k % 2 == 0 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(4.0 / pi * sum, 0.0, 1.0);
}

double sup_abs_brownian_quantile(double p) {
  return bisect_quantile(sup_abs_brownian_cdf, p, 0.05, 20.0);
}

KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf,
                       double level) {
  if (sample.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  KsResult r;
  r.statistic = d;
  r.scaled = std::sqrt(n) * d;
  r.critical = kolmogorov_quantile(level) / std::sqrt(n);
  r.p_value = kolmogorov_survival(r.scaled);
  r.pass = d < r.critical;
  return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double level) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double n_eff = na * nb / (na + nb);
  KsResult r;
  r.statistic = d;
  r.scaled = std::sqrt(n_eff) * d;
  r.critical = kolmogorov_quantile(level) / std::sqrt(n_eff);
  r.p_value = kolmogorov_survival(r.scaled);
  r.pass = d < r.critical;
  return r;
}

double batch_means_se(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 16) throw std::invalid_argument("batch_means_se: series too short");
  const auto batches = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const std::size_t len = n / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    means[b] = mean(xs.subspan(b * len, len));
  }
  return std::sqrt(variance(means) / static_cast<double>(batches));
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("least_squares: need matching series of length >= 2");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw NumericError("least_squares: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.residual_max =
        std::max(fit.residual_max, std::abs(y[i] - (fit.intercept + fit.slope * x[i])));
  }
  return fit;
}

}  // namespace rwmlab::stats
