#include "catch_amalgamated.hpp"
#include "eom/environment.hpp"

#include <cmath>

using Catch::Approx;
using eom::Environment;
using eom::TypeSpace;

TEST_CASE("type space rejects invalid bounds")
{
  CHECK_THROWS_AS(TypeSpace(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(TypeSpace(-0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(TypeSpace(0.0, INFINITY), std::invalid_argument);
  CHECK_NOTHROW(TypeSpace(0.0, 2.0));
}

TEST_CASE("linear unit-demand environment satisfies every assumption")
{
  const auto env = Environment::linear_unit_demand(TypeSpace(0.0, 1.0), 0.0);
  const auto report = eom::validate_environment(env, 50);
  CHECK(report.all_passed());
  CHECK(report.checks.size() == 8);
}

TEST_CASE("decreasing cost fails monotonicity but not convexity")
{
  const auto env = Environment(
    TypeSpace(0.0, 1.0), 1.0, [](double t, double x) { return t * x; }, [](double, double x) { return x; },
    [](double x) { return -x; }, eom::EnvironmentKind::SeparableScreening);
  const auto report = eom::validate_environment(env, 50);
  CHECK_FALSE(report.find("c nondecreasing")->passed);
  CHECK(report.find("c convex")->passed);
  CHECK(report.find("c nondecreasing")->worst_violation > 0.0);
}

TEST_CASE("unshifted valuation with a positive lower type fails the zero-at-bottom check")
{
  const auto env = Environment::linear_unit_demand(TypeSpace(0.2, 1.0), 0.0);
  const auto report = eom::validate_environment(env, 50);
  const auto* check = report.find("v(theta_min, x) = 0");
  REQUIRE(check);
  CHECK_FALSE(check->passed);
  CHECK(check->worst_theta == 0.2);
  CHECK(check->worst_violation == Approx(0.2));
}

TEST_CASE("submodular valuation is flagged")
{
  const auto env = Environment(
    TypeSpace(0.0, 1.0), 1.0, [](double t, double x) { return t + x - t * x; },
    [](double, double x) { return 1.0 - x; }, [](double) { return 0.0; }, eom::EnvironmentKind::SeparableScreening);
  const auto report = eom::validate_environment(env, 20);
  CHECK_FALSE(report.find("v supermodular")->passed);
}

TEST_CASE("Lipschitz constant of the linear environment")
{
  CHECK(eom::lipschitz_constant(Environment::linear_unit_demand(TypeSpace(0.0, 1.0), 0.0)) == 4.0);
  CHECK(eom::lipschitz_constant(Environment::linear_unit_demand(TypeSpace(0.0, 1.0), 0.5)) == 5.0);
  CHECK(eom::lipschitz_constant(Environment::linear_unit_demand(TypeSpace(0.0, 2.0), 0.0)) == 8.0);
  // 2 (theta_max x_max + (theta_max - theta_min) x_max + c_bar x_max), exactly.
  CHECK(eom::lipschitz_constant(Environment::linear_unit_demand(TypeSpace(0.5, 3.0), 0.25, 2.0)) ==
        2.0 * (3.0 * 2.0 + 2.5 * 2.0 + 0.25 * 2.0));
}

TEST_CASE("Lipschitz constant with a type-dependent marginal valuation")
{
  // v = theta^2 x, v_1 = 2 theta x: L = 2 (1 + 1 * 2 + c(1)).
  const auto env = Environment(
    TypeSpace(0.0, 1.0), 1.0, [](double t, double x) { return t * t * x; }, [](double t, double x) { return 2.0 * t * x; },
    [](double x) { return 0.5 * x * x; }, eom::EnvironmentKind::SeparableScreening);
  CHECK(eom::lipschitz_constant(env) == Approx(2.0 * (1.0 + 2.0 + 0.5)).epsilon(1e-12));

  // Interior maximum of v_1 at theta = 0.5: v_1 = x (1 - (2 theta - 1)^2).
  const auto bump = Environment(
    TypeSpace(0.0, 1.0), 1.0, [](double t, double x) { return x * (2.0 * t * t - 4.0 * t * t * t / 3.0); },
    [](double t, double x) { return x * (1.0 - (2.0 * t - 1.0) * (2.0 * t - 1.0)); }, [](double) { return 0.0; },
    eom::EnvironmentKind::SeparableScreening);
  CHECK(eom::lipschitz_constant(bump) == Approx(2.0 * (2.0 / 3.0 + 1.0)).epsilon(1e-9));
}

TEST_CASE("separable environment evaluates theta b(x)")
{
  const auto env = Environment::separable(TypeSpace(0.0, 1.0), 1.0, [](double x) { return std::sqrt(x); },
                                          [](double x) { return 0.5 * x * x; });
  CHECK(env.valuation(0.5, 0.25) == Approx(0.25));
  CHECK(env.valuation_d_theta(0.3, 0.25) == Approx(0.5));
  CHECK(env.utility(0.5, 0.25, 0.1) == Approx(0.15));
  CHECK(env.kind() == eom::EnvironmentKind::SeparableScreening);
  CHECK(eom::validate_environment(env, 40).all_passed());
}
