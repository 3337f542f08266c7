#include "rwmlab/rng.hpp"

#include <cmath>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>

namespace rwmlab {

namespace {
__extension__ typedef unsigned __int128 u128;
}  // namespace

std::uint64_t Rng::below(std::uint64_t n) noexcept {
  u128 m = static_cast<u128>((*this)()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>((*this)()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::exponential() { return -std::log(uniform_open()); }

double Rng::gamma(double shape, double scale) {
  boost::random::gamma_distribution<double> dist(shape, scale);
  return dist(*this);
}

double Rng::student_t(double df) {
  boost::random::student_t_distribution<double> dist(df);
  return dist(*this);
}

}  // namespace rwmlab
