#pragma once

#include <boost/math/special_functions/beta.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace eom::special {

namespace detail {

using double_policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

}  // namespace detail

inline double log_beta(double a, double b)
{
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Regularized incomplete beta I_x(a, b) for a, b > 0.
inline double incomplete_beta(double a, double b, double x)
{
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x, detail::double_policy());
}

// Smallest double x in [0, 1] with I_x(a, b) >= p.
inline double inverse_incomplete_beta(double a, double b, double p)
{
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("inverse_incomplete_beta: a, b must be > 0");
  if (p <= 0.0) return 0.0;
  double x = p >= 1.0 ? 1.0 : boost::math::ibeta_inv(a, b, p, detail::double_policy());
  constexpr int kPolish = 64;
  int steps = 0;
  while (incomplete_beta(a, b, x) < p && steps++ < kPolish) x = std::nextafter(x, 1.0);
  while (x > 0.0 && incomplete_beta(a, b, std::nextafter(x, 0.0)) >= p && steps++ < kPolish) {
    x = std::nextafter(x, 0.0);
  }
  if (steps < kPolish) return x;
  // Fall back to bisection on the ordered bit patterns of [0, 1].
  auto bits = [](double v) { return std::bit_cast<std::uint64_t>(v); };
  std::uint64_t lo = 0, hi = bits(1.0);
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (incomplete_beta(a, b, std::bit_cast<double>(mid)) >= p) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::bit_cast<double>(hi);
}

inline double beta_density(double a, double b, double x)
{
  if (x < 0.0 || x > 1.0) return 0.0;
  if ((x == 0.0 && a < 1.0) || (x == 1.0 && b < 1.0)) return std::numeric_limits<double>::infinity();
  if (x == 0.0) return a == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
  if (x == 1.0) return b == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b));
}

}  // namespace eom::special
