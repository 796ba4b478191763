#pragma once

#include "eom/errors.hpp"
#include "eom/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eom {

// Willingness-to-pay interval [lower, upper].
class TypeSpace
{
public:
  TypeSpace(double lower, double upper)
    : lower_(lower)
    , upper_(upper)
  {
    if (!std::isfinite(lower) || !std::isfinite(upper) || lower < 0.0 || !(lower < upper)) {
      throw std::invalid_argument("TypeSpace requires finite 0 <= lower < upper");
    }
  }

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  double width() const noexcept { return upper_ - lower_; }
  bool contains(double theta) const noexcept { return theta >= lower_ && theta <= upper_; }

private:
  double lower_;
  double upper_;
};

enum class EnvironmentKind
{
  LinearUnitDemand,   // v = theta * x, c = c_bar * x
  SeparableScreening  // v multiplicatively separable, c convex
};

// Economic primitives: types, quantities, valuation v(theta, x) with its
// theta-derivative, and production cost c(x). Immutable after construction.
class Environment
{
public:
  using Valuation = std::function<double(double theta, double x)>;
  using Cost = std::function<double(double x)>;

  Environment(TypeSpace types,
              double x_max,
              Valuation valuation,
              Valuation valuation_d_theta,
              Cost cost,
              EnvironmentKind kind,
              double c_bar = 0.0)
    : types_(types)
    , x_max_(x_max)
    , valuation_(std::move(valuation))
    , valuation_d_theta_(std::move(valuation_d_theta))
    , cost_(std::move(cost))
    , kind_(kind)
    , c_bar_(c_bar)
  {
    if (!(x_max > 0.0) || !std::isfinite(x_max)) throw std::invalid_argument("x_max must be positive");
    if (!valuation_ || !valuation_d_theta_ || !cost_) throw std::invalid_argument("environment functions must be set");
    if (kind == EnvironmentKind::LinearUnitDemand && !(c_bar >= 0.0)) {
      throw std::invalid_argument("c_bar must be >= 0");
    }
  }

  static Environment linear_unit_demand(TypeSpace types, double c_bar, double x_max = 1.0)
  {
    return Environment(
      types,
      x_max,
      [](double theta, double x) { return theta * x; },
      [](double, double x) { return x; },
      [c_bar](double x) { return c_bar * x; },
      EnvironmentKind::LinearUnitDemand,
      c_bar);
  }

  // v(theta, x) = theta * b(x); cost is arbitrary.
  static Environment separable(TypeSpace types, double x_max, std::function<double(double)> b, Cost cost)
  {
    auto v = [b](double theta, double x) { return theta * b(x); };
    auto v1 = [b](double, double x) { return b(x); };
    return Environment(types, x_max, v, v1, std::move(cost), EnvironmentKind::SeparableScreening);
  }

  const TypeSpace& types() const noexcept { return types_; }
  double x_max() const noexcept { return x_max_; }
  EnvironmentKind kind() const noexcept { return kind_; }
  double c_bar() const noexcept { return c_bar_; }

  double valuation(double theta, double x) const { return valuation_(theta, x); }
  double valuation_d_theta(double theta, double x) const { return valuation_d_theta_(theta, x); }
  double cost(double x) const { return cost_(x); }
  double utility(double theta, double x, double price) const { return valuation_(theta, x) - price; }

private:
  TypeSpace types_;
  double x_max_;
  Valuation valuation_;
  Valuation valuation_d_theta_;
  Cost cost_;
  EnvironmentKind kind_;
  double c_bar_;
};

inline const char* to_string(EnvironmentKind kind)
{
  return kind == EnvironmentKind::LinearUnitDemand ? "linear" : "separable";
}

struct AssumptionCheck
{
  std::string name;
  bool passed = true;
  double worst_violation = 0.0;  // 0 when passed
  double worst_theta = std::numeric_limits<double>::quiet_NaN();
  double worst_x = std::numeric_limits<double>::quiet_NaN();
};

struct ValidationReport
{
  std::vector<AssumptionCheck> checks;

  bool all_passed() const
  {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }

  const AssumptionCheck* find(const std::string& name) const
  {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

namespace detail {

inline constexpr double kAssumptionTolerance = 1e-9;

inline void record(AssumptionCheck& check, double violation, double theta, double x)
{
  if (violation > kAssumptionTolerance && violation > check.worst_violation) {
    check.passed = false;
    check.worst_violation = violation;
    check.worst_theta = theta;
    check.worst_x = x;
  }
}

}  // namespace detail

// Grid checks of the model assumptions. Violations are reported, never thrown.
inline ValidationReport validate_environment(const Environment& env, std::size_t grid_size)
{
  if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  const auto thetas = numeric::linspace(env.types().lower(), env.types().upper(), grid_size);
  const auto xs = numeric::linspace(0.0, env.x_max(), grid_size);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  AssumptionCheck v_lower{"v(theta_min, x) = 0"};
  AssumptionCheck v_zero{"v(theta, 0) = 0"};
  AssumptionCheck v_mono_theta{"v nondecreasing in theta"};
  AssumptionCheck v_mono_x{"v nondecreasing in x"};
  AssumptionCheck supermodular{"v supermodular"};
  AssumptionCheck c_zero{"c(0) = 0"};
  AssumptionCheck c_mono{"c nondecreasing"};
  AssumptionCheck c_convex{"c convex"};

  const double lo = env.types().lower();
  for (double x : xs) detail::record(v_lower, std::fabs(env.valuation(lo, x)), lo, x);
  for (double t : thetas) detail::record(v_zero, std::fabs(env.valuation(t, 0.0)), t, 0.0);

  for (std::size_t i = 0; i < grid_size; ++i) {
    for (std::size_t j = 0; j < grid_size; ++j) {
      const double v = env.valuation(thetas[i], xs[j]);
      if (i + 1 < grid_size) {
        detail::record(v_mono_theta, v - env.valuation(thetas[i + 1], xs[j]), thetas[i], xs[j]);
      }
      if (j + 1 < grid_size) {
        detail::record(v_mono_x, v - env.valuation(thetas[i], xs[j + 1]), thetas[i], xs[j]);
      }
      if (i + 1 < grid_size && j + 1 < grid_size) {
        const double cross = env.valuation(thetas[i + 1], xs[j + 1]) - env.valuation(thetas[i + 1], xs[j]) -
                             env.valuation(thetas[i], xs[j + 1]) + v;
        detail::record(supermodular, -cross, thetas[i], xs[j]);
      }
    }
  }

  detail::record(c_zero, std::fabs(env.cost(0.0)), nan, 0.0);
  for (std::size_t j = 0; j + 1 < grid_size; ++j) {
    detail::record(c_mono, env.cost(xs[j]) - env.cost(xs[j + 1]), nan, xs[j]);
    if (j + 2 < grid_size) {
      const double second = env.cost(xs[j + 2]) - 2.0 * env.cost(xs[j + 1]) + env.cost(xs[j]);
      detail::record(c_convex, -second, nan, xs[j + 1]);
    }
  }

  return ValidationReport{{v_lower, v_zero, v_mono_theta, v_mono_x, supermodular, c_zero, c_mono, c_convex}};
}

// Uniform bound on how far expected profit can move per unit of sup-norm
// distance between type distributions:
//   L = 2 (v(theta_max, x_max) + (theta_max - theta_min) max_theta v_1(theta, x_max) + c(x_max))
inline double lipschitz_constant(const Environment& env)
{
  const auto& types = env.types();
  const double xbar = env.x_max();
  double max_v1 = 0.0;
  if (env.kind() == EnvironmentKind::LinearUnitDemand) {
    max_v1 = xbar;
  } else {
    constexpr std::size_t grid = 10001;
    const auto thetas = numeric::linspace(types.lower(), types.upper(), grid);
    std::size_t best = 0;
    max_v1 = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid; ++i) {
      const double value = env.valuation_d_theta(thetas[i], xbar);
      if (value > max_v1) {
        max_v1 = value;
        best = i;
      }
    }
    const double a = thetas[best == 0 ? 0 : best - 1];
    const double b = thetas[best + 1 < grid ? best + 1 : best];
    if (b > a) {
      const auto refined = numeric::golden_section_max(
        [&](double t) { return env.valuation_d_theta(t, xbar); }, a, b, 1e-12);
      max_v1 = std::max(max_v1, refined.value);
    }
  }
  const double L = 2.0 * (env.valuation(types.upper(), xbar) + types.width() * max_v1 + env.cost(xbar));
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("environment yields a non-positive Lipschitz constant");
  return L;
}

}  // namespace eom
