#pragma once

#include "eom/eom.hpp"

#include <cmath>
#include <vector>

namespace testing {

inline eom::Environment unit_linear(double c_bar = 0.0)
{
  return eom::Environment::linear_unit_demand(eom::TypeSpace(0.0, 1.0), c_bar);
}

// Random law on [0, 1]: a mixture of Beta, Uniform and point-mass pieces,
// an empirical CDF, or a piecewise-linear CDF.
inline eom::Cdf random_cdf(eom::Stream& rng)
{
  const auto family = rng.below(4);
  if (family == 0) {
    const auto n = 1 + rng.below(30);
    std::vector<double> xs(n);
    for (auto& x : xs) x = rng.uniform01();
    return eom::Cdf::empirical(eom::Sample(xs));
  }
  if (family == 1) {
    const auto k = 2 + rng.below(6);
    std::vector<double> x{0.0}, y{0.0};
    std::vector<double> cuts(k - 1);
    for (auto& c : cuts) c = rng.uniform01();
    std::sort(cuts.begin(), cuts.end());
    for (double c : cuts) {
      if (c > x.back()) x.push_back(c);
    }
    x.push_back(1.0);
    std::vector<double> ys(x.size() - 2);
    for (auto& v : ys) v = rng.uniform01();
    std::sort(ys.begin(), ys.end());
    for (double v : ys) y.push_back(v);
    y.push_back(1.0);
    return eom::Cdf::piecewise_linear(x, y);
  }
  const auto parts = 1 + rng.below(3);
  std::vector<double> w(parts);
  double total = 0.0;
  for (auto& v : w) total += (v = 0.1 + rng.uniform01());
  for (auto& v : w) v /= total;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < parts; ++i) s += w[i];
  w.back() = 1.0 - s;
  std::vector<eom::Cdf> comps;
  for (std::size_t i = 0; i < parts; ++i) {
    const auto kind = rng.below(family == 2 ? 2 : 3);
    if (kind == 0) {
      comps.push_back(eom::Cdf::beta(0.3 + 5.0 * rng.uniform01(), 0.3 + 5.0 * rng.uniform01()));
    } else if (kind == 1) {
      const double a = 0.5 * rng.uniform01();
      comps.push_back(eom::Cdf::uniform(a, a + 0.1 + (0.9 - a) * rng.uniform01()));
    } else {
      comps.push_back(eom::Cdf::point_mass(rng.uniform01()));
    }
  }
  if (parts == 1) return comps.front();
  return eom::Cdf::mixture(w, comps);
}

// Random finite menu for the linear unit-demand environment on [0, 1]
// (quantities in (0, 1], prices in (0, 1]).
inline eom::Menu random_menu(eom::Stream& rng)
{
  const auto k = rng.below(5);
  std::vector<eom::MenuItem> items;
  for (std::size_t i = 0; i < k; ++i) items.push_back({0.05 + 0.95 * rng.uniform01(), 0.01 + 0.99 * rng.uniform01()});
  return eom::Menu(items);
}

// Midpoint rule with n cells.
template <typename F>
double midpoint_integral(F&& f, double a, double b, std::size_t n)
{
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += f(a + (static_cast<double>(i) + 0.5) * h);
  return s * h;
}

// Exact sup |ECDF - Uniform(0,1)| for a sorted sample inside [0, 1].
inline double ks_uniform(std::span<const double> sorted)
{
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - sorted[i]);
    d = std::max(d, sorted[i] - static_cast<double>(i) / n);
  }
  return d;
}

}  // namespace testing
