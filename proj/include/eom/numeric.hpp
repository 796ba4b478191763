#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace eom::numeric {

// Golden ratio conjugate, (sqrt(5) - 1) / 2.
inline constexpr double kInvPhi = 0.6180339887498949;

struct Maximum
{
  double argmax;
  double value;
  int iterations;
};

// Golden-section search for a maximum of f on [a, b]. The endpoints are
// compared against the interior result so a monotone objective resolves to
// the boundary exactly; ties go to the smaller argument.
template <typename F>
Maximum golden_section_max(F&& f, double a, double b, double tol = 1e-10)
{
  double lo = a, hi = b;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  int iterations = 0;
  while (hi - lo > tol && iterations < 200) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
    ++iterations;
  }
  Maximum best{x1, f1, iterations};
  if (f2 > best.value) best = {x2, f2, iterations};
  const double fa = f(a);
  if (fa >= best.value) best = {a, fa, iterations};
  const double fb = f(b);
  if (fb > best.value) best = {b, fb, iterations};
  return best;
}

// Smallest x in [lo, hi] with pred(x) true, assuming pred is monotone
// (false ... false true ... true) and pred(hi) holds. Returns the upper end
// of the final bracket, which is within tol of the switch point.
template <typename Pred>
double bisect_first_true(Pred&& pred, double lo, double hi, double tol = 1e-12)
{
  if (pred(lo)) return lo;
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Type-7 sample quantile (linear interpolation between order statistics).
// `sorted` must be ascending and non-empty.
inline double quantile_type7(std::span<const double> sorted, double p)
{
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto k = static_cast<std::size_t>(std::floor(h));
  if (k + 1 >= sorted.size()) return sorted.back();
  return sorted[k] + (h - static_cast<double>(k)) * (sorted[k + 1] - sorted[k]);
}

// Evenly spaced points lo, ..., hi (count >= 2).
inline std::vector<double> linspace(double lo, double hi, std::size_t count)
{
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

inline double mean(std::span<const double> xs)
{
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

// Sample standard deviation with the n - 1 divisor.
inline double sample_sd(std::span<const double> xs)
{
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace eom::numeric
