#pragma once

// Globally adaptive Gauss-Kronrod quadrature with dyadic refinement.
//
// The 21-point Gauss-Kronrod rule (nodes and weights from Boost.Math) is
// applied on each interval; the interval with the largest error estimate is
// bisected until the summed error estimate is below the absolute tolerance.
// Infinite endpoints are mapped to a finite range first:
//   [a, inf)  : x = a + t / (1 - t),      t in [0, 1)
//   (-inf, b] : x = b - t / (1 - t),      t in [0, 1)
//   (-inf,inf): x = t / (1 - t^2),        t in (-1, 1)
// Hitting the interval cap raises NumericError; the result is never silently
// truncated.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>

namespace rwmlab::quad {

struct Options {
  double abs_tol = 1e-10;
  std::size_t max_intervals = 4096;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
};

using Integrand = std::function<double(double)>;

/// Integral of f over [a, b]; either endpoint may be +-infinity.
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

/// Same, with forced breakpoints (kinks, discontinuities) inside (a, b).
Result integrate(const Integrand& f, double a, double b, std::initializer_list<double> breaks,
                 const Options& opts = {});
Result integrate(const Integrand& f, double a, double b, std::span<const double> breaks,
                 const Options& opts = {});

/// Convenience: value only.
inline double integral(const Integrand& f, double a, double b, const Options& opts = {}) {
  return integrate(f, a, b, opts).value;
}

}  // namespace rwmlab::quad
