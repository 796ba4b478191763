#pragma once

#include "eom/distributions.hpp"
#include "eom/environment.hpp"
#include "eom/errors.hpp"
#include "eom/mechanisms.hpp"
#include "eom/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eom {

enum class SolveMethod
{
  UniformPriceEnumeration,  // purely atomic F, exact
  UniformPricePiecewise,    // piecewise-linear F, exact per segment
  UniformPriceGrid,         // grid search plus golden-section refinement
  IronedVirtualValue        // separable screening via ironing
};

inline const char* to_string(SolveMethod m)
{
  switch (m) {
    case SolveMethod::UniformPriceEnumeration: return "uniform_price_enumeration";
    case SolveMethod::UniformPricePiecewise: return "uniform_price_piecewise";
    case SolveMethod::UniformPriceGrid: return "uniform_price_grid";
    case SolveMethod::IronedVirtualValue: return "ironed_virtual_value";
  }
  return "?";
}

struct SolverOptions
{
  std::size_t price_grid = 10000;
  std::size_t ironing_segments = 2000;
  double refine_tolerance = 1e-10;
  std::size_t refine_candidates = 5;
};

struct SolveDiagnostics
{
  std::size_t grid_size = 0;
  int refinement_iterations = 0;
};

struct SolveResult
{
  Menu menu;
  double optimal_value = 0.0;
  SolveMethod method = SolveMethod::UniformPriceEnumeration;
  SolveDiagnostics diagnostics;
  std::optional<double> price;  // per-unit price, uniform-price solvers only
};

namespace detail {

struct PriceCandidate
{
  double price;
  double value;
};

// Keeps the larger value; on a tie the smaller price.
inline void consider(PriceCandidate& best, double price, double value)
{
  if (value > best.value || (value == best.value && price < best.price)) best = {price, value};
}

}  // namespace detail

// Best posted price for v = theta x, c = c_bar x: maximize
// (p - c_bar)(1 - F(p-)), i.e. buyers with theta >= p purchase. The smallest
// maximizing price is returned.
inline SolveResult optimal_uniform_price(const Cdf& F, const Environment& env, const SolverOptions& opt = {})
{
  if (env.kind() != EnvironmentKind::LinearUnitDemand) {
    throw DomainError("optimal_uniform_price requires a linear unit-demand environment");
  }
  const double c = env.c_bar();
  const double xbar = env.x_max();
  const auto revenue = [&](double p) { return (p - c) * (1.0 - F(p, Side::LeftLimit)); };

  detail::PriceCandidate best{0.0, -std::numeric_limits<double>::infinity()};
  SolveResult result;

  if (const auto* e = F.as<dist::EmpiricalStep>()) {
    const auto v = e->sample.values();
    const auto n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && v[i] == v[i - 1]) continue;
      detail::consider(best, v[i], (v[i] - c) * static_cast<double>(n - i) / static_cast<double>(n));
    }
    result.method = SolveMethod::UniformPriceEnumeration;
  } else if (F.is_atomic()) {
    for (double p : F.jumps()) detail::consider(best, p, revenue(p));
    result.method = SolveMethod::UniformPriceEnumeration;
  } else if (const auto* pl = F.as<dist::PiecewiseLinear>()) {
    // Revenue is a concave quadratic on every segment.
    for (std::size_t k = 0; k < pl->x.size(); ++k) {
      detail::consider(best, pl->x[k], revenue(pl->x[k]));
      if (k + 1 == pl->x.size()) break;
      const double s = (pl->y[k + 1] - pl->y[k]) / (pl->x[k + 1] - pl->x[k]);
      if (s <= 0.0) continue;
      const double a = 1.0 - pl->y[k] + s * pl->x[k];
      const double p = std::clamp((a + s * c) / (2.0 * s), pl->x[k], pl->x[k + 1]);
      detail::consider(best, p, revenue(p));
    }
    result.method = SolveMethod::UniformPricePiecewise;
  } else {
    const auto support = F.support();
    const auto grid = numeric::linspace(support.lower, support.upper, std::max<std::size_t>(opt.price_grid, 2));
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      values[i] = revenue(grid[i]);
      detail::consider(best, grid[i], values[i]);
    }
    for (double p : F.jumps()) detail::consider(best, p, revenue(p));

    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    const auto top = std::min(opt.refine_candidates, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                      [&](std::size_t a, std::size_t b) { return values[a] > values[b] || (values[a] == values[b] && a < b); });
    for (std::size_t r = 0; r < top; ++r) {
      const std::size_t i = order[r];
      const double lo = grid[i == 0 ? 0 : i - 1];
      const double hi = grid[std::min(i + 1, grid.size() - 1)];
      const auto refined = numeric::golden_section_max(revenue, lo, hi, opt.refine_tolerance);
      result.diagnostics.refinement_iterations += refined.iterations;
      detail::consider(best, refined.argmax, refined.value);
    }
    result.method = SolveMethod::UniformPriceGrid;
    result.diagnostics.grid_size = grid.size();
  }

  if (best.value > 0.0) {
    result.menu = Menu({{xbar, xbar * best.price}});
    result.optimal_value = xbar * best.value;
    result.price = best.price;
  }
  return result;
}

// Virtual values on a uniform quantile grid, and their ironed counterparts.
struct IronedTable
{
  std::vector<double> quantiles;           // q_0 = 0 < ... < q_G = 1
  std::vector<double> theta_edges;         // F^{-1}(q_k)
  std::vector<double> theta_mid;           // F^{-1} at segment midpoints
  std::vector<double> psi;                 // J at the segment midpoints
  std::vector<double> psi_bar;             // ironed J, nondecreasing
  std::vector<double> cumulative;          // Psi at q_k
  std::vector<double> cumulative_ironed;   // greatest convex minorant of Psi at q_k

  std::size_t segments() const noexcept { return psi.size(); }
};

namespace detail {

// Lower convex hull (monotone chain) of (x_k, y_k), x ascending; returns
// indices of the hull vertices.
inline std::vector<std::size_t> lower_hull(std::span<const double> x, std::span<const double> y)
{
  std::vector<std::size_t> hull;
  for (std::size_t k = 0; k < x.size(); ++k) {
    while (hull.size() >= 2) {
      const auto a = hull[hull.size() - 2], b = hull.back();
      const double cross = (x[b] - x[a]) * (y[k] - y[a]) - (y[b] - y[a]) * (x[k] - x[a]);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(k);
  }
  return hull;
}

}  // namespace detail

// Ironing of equal-width segment values: the slopes of the greatest convex
// minorant of their running sum. Pooled blocks take the block mean.
inline void iron(IronedTable& t)
{
  const std::size_t G = t.psi.size();
  const double width = 1.0 / static_cast<double>(G);
  t.cumulative.assign(G + 1, 0.0);
  for (std::size_t i = 0; i < G; ++i) t.cumulative[i + 1] = t.cumulative[i] + t.psi[i] * width;
  if (t.quantiles.size() != G + 1) {
    t.quantiles.resize(G + 1);
    for (std::size_t k = 0; k <= G; ++k) t.quantiles[k] = static_cast<double>(k) * width;
  }

  const auto hull = detail::lower_hull(t.quantiles, t.cumulative);
  t.psi_bar.assign(G, 0.0);
  t.cumulative_ironed.assign(G + 1, 0.0);
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const auto from = hull[h], to = hull[h + 1];
    double block = 0.0;
    for (std::size_t i = from; i < to; ++i) block += t.psi[i];
    const double slope = block / static_cast<double>(to - from);
    for (std::size_t i = from; i < to; ++i) t.psi_bar[i] = slope;
    t.cumulative_ironed[from] = t.cumulative[from];
    for (std::size_t k = from + 1; k < to; ++k) {
      t.cumulative_ironed[k] = t.cumulative[from] + (t.quantiles[k] - t.quantiles[from]) * slope;
    }
  }
  t.cumulative_ironed[G] = t.cumulative[G];
}

inline std::vector<double> iron_segments(std::span<const double> psi)
{
  if (psi.empty()) throw std::invalid_argument("nothing to iron");
  IronedTable t;
  t.psi.assign(psi.begin(), psi.end());
  iron(t);
  return t.psi_bar;
}

// J(theta) = theta - (1 - F(theta)) / f(theta), evaluated at the midpoint
// quantile of each of `segments` equal quantile cells, then ironed.
inline IronedTable ironed_virtual_value(const Cdf& F, std::size_t segments)
{
  if (!F.has_density()) throw DomainError("ironing requires a distribution with a density");
  if (segments < 1) throw std::invalid_argument("ironing needs at least one segment");
  IronedTable t;
  const double width = 1.0 / static_cast<double>(segments);
  t.quantiles.resize(segments + 1);
  t.theta_edges.resize(segments + 1);
  for (std::size_t k = 0; k <= segments; ++k) {
    t.quantiles[k] = k == segments ? 1.0 : static_cast<double>(k) * width;
    t.theta_edges[k] = quantile(F, t.quantiles[k]);
  }
  t.theta_mid.resize(segments);
  t.psi.resize(segments);
  for (std::size_t i = 0; i < segments; ++i) {
    const double q = (static_cast<double>(i) + 0.5) * width;
    const double theta = quantile(F, q);
    const double f = F.density(theta);
    if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("ironing requires a positive, finite density");
    t.theta_mid[i] = theta;
    t.psi[i] = theta - (1.0 - q) / f;
  }
  iron(t);
  return t;
}

// Pointwise maximization of psi_bar(theta) v(theta, x) - c(x) on the
// quantile grid; the resulting step allocation is priced by the envelope
// payment rule.
inline SolveResult optimal_screening_menu(const Cdf& F, const Environment& env, const SolverOptions& opt = {})
{
  if (env.kind() != EnvironmentKind::SeparableScreening) {
    throw DomainError("optimal_screening_menu requires a separable screening environment");
  }
  const auto table = ironed_virtual_value(F, opt.ironing_segments);
  const std::size_t G = table.segments();
  const double xbar = env.x_max();

  std::vector<double> x(G);
  int iterations = 0;
  for (std::size_t i = 0; i < G; ++i) {
    const double theta = table.theta_mid[i];
    const double jbar = table.psi_bar[i];
    const auto objective = [&](double q) { return jbar * env.valuation(theta, q) - env.cost(q); };
    const auto best = numeric::golden_section_max(objective, 0.0, xbar, 1e-12);
    iterations += best.iterations;
    x[i] = best.argmax;
  }

  // Monotone step allocation; steps smaller than the search tolerance merge.
  std::vector<double> breakpoints, quantities;
  double level = 0.0;
  for (std::size_t i = 0; i < G; ++i) {
    const double q = std::max(level, x[i]);
    if (q > level + 1e-9 * xbar) {
      breakpoints.push_back(table.theta_edges[i]);
      quantities.push_back(q);
      level = q;
    }
  }

  SolveResult result;
  result.menu = menu_from_allocation(Allocation(std::move(breakpoints), std::move(quantities)), env);
  result.optimal_value = expected_profit(result.menu, F, env);
  result.method = SolveMethod::IronedVirtualValue;
  result.diagnostics.grid_size = G;
  result.diagnostics.refinement_iterations = iterations;
  return result;
}

// Value function Pi(F) and an optimal menu, dispatched on the environment.
inline SolveResult optimal_profit(const Cdf& F, const Environment& env, const SolverOptions& opt = {})
{
  switch (env.kind()) {
    case EnvironmentKind::LinearUnitDemand: return optimal_uniform_price(F, env, opt);
    case EnvironmentKind::SeparableScreening:
      if (!F.has_density()) {
        throw DomainError("no solver for " + F.name() +
                          " in a separable environment; supported pairs are (any distribution, linear) and "
                          "(distribution with density, separable)");
      }
      return optimal_screening_menu(F, env, opt);
  }
  throw DomainError("unknown environment kind");
}

}  // namespace eom
