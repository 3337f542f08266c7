#include "rwmlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rwmlab/error.hpp"

namespace rwmlab::quad {
namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& other) const { return error < other.error; }
};

Piece evaluate(const Integrand& g, double a, double b) {
  double err = 0.0;
  const double v = Rule::integrate(g, a, b, 0, 0.0, &err);
  // With max_depth = 0 Boost reports |K - G| on the reference interval
  // [-1, 1]; the absolute error on [a, b] carries the half-width factor.
  err *= 0.5 * (b - a);
  if (!std::isfinite(v) || !std::isfinite(err)) {
    std::ostringstream msg;
    msg << "quadrature: non-finite integrand value on [" << a << ", " << b << "]";
    throw NumericError(msg.str());
  }
  return {a, b, v, err};
}

// Adaptive bisection of a finite interval set for an already-transformed
// integrand. The caller supplies the initial partition.
Result adapt(const Integrand& g, const std::vector<double>& cuts, const Options& opts) {
  std::priority_queue<Piece> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    Piece p = evaluate(g, cuts[i], cuts[i + 1]);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  std::size_t count = heap.size();
  while (total_err > opts.abs_tol) {
    if (count >= opts.max_intervals) {
      std::ostringstream msg;
      msg << "quadrature: interval cap " << opts.max_intervals
          << " reached with error estimate " << total_err << " > " << opts.abs_tol;
      throw NumericError(msg.str());
    }
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw NumericError("quadrature: interval collapsed below machine resolution");
    }
    Piece left = evaluate(g, worst.a, mid);
    Piece right = evaluate(g, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
    // Guard against drift of the running sums after many updates.
    if (count % 512 == 0) {
      std::vector<Piece> all;
      all.reserve(heap.size());
      total = total_err = 0.0;
      while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
      }
      for (const auto& p : all) {
        total += p.value;
        total_err += p.error;
        heap.push(p);
      }
    }
  }
  return {total, total_err, count};
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, std::initializer_list<double> breaks,
                 const Options& opts) {
  return integrate(f, a, b, std::span<const double>(breaks.begin(), breaks.size()), opts);
}

Result integrate(const Integrand& f, double a, double b, std::span<const double> breaks,
                 const Options& opts) {
  if (std::isnan(a) || std::isnan(b)) throw NumericError("quadrature: NaN limit");
  if (a == b) return {};
  if (a > b) {
    Result r = integrate(f, b, a, breaks, opts);
    r.value = -r.value;
    return r;
  }

  std::vector<double> points{a};
  for (double c : breaks) {
    if (c > a && c < b) points.push_back(c);
  }
  points.push_back(b);
  std::sort(points.begin(), points.end());

  const bool lo_inf = std::isinf(a);
  const bool hi_inf = std::isinf(b);

  if (!lo_inf && !hi_inf) return adapt(f, points, opts);

  // Map the real line, or a half line, onto a bounded interval. Breakpoints
  // are mapped through the inverse transform so they stay interval ends.
  if (lo_inf && hi_inf) {
    auto g = [&f](double t) {
      const double den = 1.0 - t * t;
      if (den <= 0.0) return 0.0;
      const double x = t / den;
      const double jac = (1.0 + t * t) / (den * den);
      if (!std::isfinite(x) || !std::isfinite(jac)) return 0.0;
      return f(x) * jac;
    };
    std::vector<double> cuts{-1.0};
    for (std::size_t i = 1; i + 1 < points.size(); ++i) {
      const double x = points[i];
      // inverse of x = t / (1 - t^2)
      const double t = (x == 0.0) ? 0.0 : (-1.0 + std::sqrt(1.0 + 4.0 * x * x)) / (2.0 * x);
      cuts.push_back(t);
    }
    if (std::find(cuts.begin(), cuts.end(), 0.0) == cuts.end()) cuts.push_back(0.0);
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    return adapt(g, cuts, opts);
  }

  const double anchor = lo_inf ? b : a;
  const double sign = lo_inf ? -1.0 : 1.0;
  auto g = [&f, anchor, sign](double t) {
    const double den = 1.0 - t;
    if (den <= 0.0) return 0.0;
    const double x = anchor + sign * t / den;
    const double jac = 1.0 / (den * den);
    if (!std::isfinite(x) || !std::isfinite(jac)) return 0.0;
    return f(x) * jac;
  };
  std::vector<double> cuts{0.0};
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const double dist = std::abs(points[i] - anchor);
    cuts.push_back(dist / (1.0 + dist));
  }
  cuts.push_back(0.5);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return adapt(g, cuts, opts);
}

Result integrate(const Integrand& f, double a, double b, const Options& opts) {
  return integrate(f, a, b, {}, opts);
}

}  // namespace rwmlab::quad
