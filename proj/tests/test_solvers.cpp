#include "catch_amalgamated.hpp"
#include "support.hpp"

#include <cmath>

using Catch::Approx;
using eom::Cdf;
using eom::Sample;

namespace {

// max over a uniform grid of (p - c)(1 - F(p-)) on [0, 1].
std::pair<double, double> grid_price_oracle(const Cdf& F, double c, std::size_t points)
{
  double best_p = 0.0, best = -1.0;
  for (std::size_t i = 0; i <= points; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(points);
    const double v = (p - c) * (1.0 - F(p, eom::Side::LeftLimit));
    if (v > best) {
      best = v;
      best_p = p;
    }
  }
  return {best_p, best};
}

}  // namespace

TEST_CASE("uniform price on an empirical CDF is found by enumeration")
{
  const auto r = eom::optimal_uniform_price(eom::ecdf(Sample({0.3, 0.5, 0.9})), testing::unit_linear());
  REQUIRE(r.price);
  CHECK(*r.price == 0.5);
  CHECK(r.optimal_value == 1.0 / 3.0);
  CHECK(r.method == eom::SolveMethod::UniformPriceEnumeration);
  REQUIRE(r.menu.size() == 1);
  CHECK(r.menu.items()[0] == eom::MenuItem{1.0, 0.5});
}

TEST_CASE("uniform price for Uniform(0,1) matches a 10^6-point grid")
{
  const auto r = eom::optimal_uniform_price(Cdf::uniform(0, 1), testing::unit_linear());
  const auto [p, v] = grid_price_oracle(Cdf::uniform(0, 1), 0.0, 1000000);
  CHECK(std::fabs(*r.price - 0.5) <= 1e-6);
  CHECK(std::fabs(r.optimal_value - 0.25) <= 1e-6);
  CHECK(std::fabs(*r.price - p) <= 1e-6);
  CHECK(r.optimal_value >= v - 1e-12);
}

TEST_CASE("uniform price for other continuous laws matches a fine grid")
{
  for (const auto& F : {Cdf::beta(0.25, 0.25), Cdf::beta(4, 4), Cdf::beta(2, 5),
                        Cdf::piecewise_linear({0, 0.2, 0.7, 1}, {0, 0.5, 0.6, 1})}) {
    for (double c : {0.0, 0.3}) {
      const auto env = testing::unit_linear(c);
      const auto r = eom::optimal_uniform_price(F, env);
      const auto [p, v] = grid_price_oracle(F, c, 200000);
      CHECK(r.optimal_value >= v - 1e-12);
      CHECK(r.optimal_value <= v + 1e-8);
      CHECK(r.optimal_value == Approx(eom::expected_profit(r.menu, F, env)).margin(1e-9));
    }
  }
}

TEST_CASE("point mass: the known type pays its full value")
{
  const auto r = eom::optimal_uniform_price(Cdf::point_mass(0.7), testing::unit_linear(0.2));
  CHECK(*r.price == 0.7);
  CHECK(r.optimal_value == Approx(0.5));
  CHECK(eom::optimal_profit(Cdf::point_mass(0.7), testing::unit_linear()).optimal_value == 0.7);
}

TEST_CASE("no profitable price gives the empty menu")
{
  const auto r = eom::optimal_uniform_price(eom::ecdf(Sample({0.1, 0.2})), testing::unit_linear(0.5));
  CHECK(r.menu.empty());
  CHECK(r.optimal_value == 0.0);
}

TEST_CASE("solver dispatch")
{
  const auto s = eom::ecdf(Sample({0.3, 0.5, 0.9}));
  CHECK(eom::optimal_profit(s, testing::unit_linear()).optimal_value ==
        eom::optimal_uniform_price(s, testing::unit_linear()).optimal_value);
  CHECK(eom::optimal_profit(Cdf::uniform(0, 1), testing::unit_linear()).optimal_value == Approx(0.25).margin(1e-9));
  const auto sep = eom::Environment::separable(eom::TypeSpace(0, 1), 1.0, [](double x) { return x; },
                                               [](double x) { return 0.5 * x * x; });
  CHECK_THROWS_AS(eom::optimal_profit(s, sep), eom::DomainError);
  CHECK_THROWS_AS(eom::optimal_uniform_price(Cdf::uniform(0, 1), sep), eom::DomainError);
  try {
    eom::optimal_profit(s, sep);
  } catch (const eom::DomainError& e) {
    CHECK(std::string(e.what()).find("supported pairs") != std::string::npos);
  }
}

TEST_CASE("ironing examples")
{
  const std::vector<double> rising{-1.0, 0.0, 2.0};
  CHECK(eom::iron_segments(rising) == rising);
  const std::vector<double> flat{0.3, 0.3, 0.3, 0.3};
  for (double v : eom::iron_segments(flat)) CHECK(v == Approx(0.3));
  const auto two = eom::iron_segments(std::vector<double>{2.0, 0.0});
  CHECK(two[0] == Approx(1.0));
  CHECK(two[1] == Approx(1.0));
}

TEST_CASE("ironed values are nondecreasing and their cumulative is a minorant")
{
  eom::Stream rng(31);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> psi(1 + rng.below(60));
    for (auto& v : psi) v = rng.uniform01() * 4.0 - 2.0;
    eom::IronedTable t;
    t.psi = psi;
    eom::iron(t);
    for (std::size_t k = 1; k < t.psi_bar.size(); ++k) CHECK(t.psi_bar[k] >= t.psi_bar[k - 1] - 1e-12);
    for (std::size_t k = 0; k < t.cumulative.size(); ++k) CHECK(t.cumulative_ironed[k] <= t.cumulative[k] + 1e-12);
    CHECK(t.cumulative_ironed.front() == t.cumulative.front());
    CHECK(t.cumulative_ironed.back() == t.cumulative.back());
    // Ironing preserves the total.
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k) {
      a += psi[k];
      b += t.psi_bar[k];
    }
    CHECK(a == Approx(b).margin(1e-10));
  }
}

TEST_CASE("virtual values of Uniform(0,1) are 2 theta - 1 and need no ironing")
{
  const auto t = eom::ironed_virtual_value(Cdf::uniform(0, 1), 100);
  for (std::size_t i = 0; i < t.segments(); ++i) {
    CHECK(t.psi[i] == Approx(2.0 * t.theta_mid[i] - 1.0).margin(1e-12));
    CHECK(t.psi_bar[i] == Approx(t.psi[i]).margin(1e-12));
  }
  CHECK_THROWS_AS(eom::ironed_virtual_value(Cdf::point_mass(0.5), 10), eom::DomainError);
}

TEST_CASE("virtual values of a bimodal law get ironed")
{
  const auto F = Cdf::mixture({0.5, 0.5}, {Cdf::beta(20, 60), Cdf::beta(60, 20)});
  const auto t = eom::ironed_virtual_value(F, 2000);
  bool raw_monotone = true;
  for (std::size_t i = 1; i < t.segments(); ++i) raw_monotone &= t.psi[i] >= t.psi[i - 1];
  CHECK_FALSE(raw_monotone);
  for (std::size_t i = 1; i < t.segments(); ++i) CHECK(t.psi_bar[i] >= t.psi_bar[i - 1] - 1e-12);
}

TEST_CASE("screening with v = theta x and no cost reproduces the posted price 1/2")
{
  const auto env = eom::Environment::separable(eom::TypeSpace(0, 1), 1.0, [](double x) { return x; },
                                               [](double) { return 0.0; });
  const auto r = eom::optimal_screening_menu(Cdf::uniform(0, 1), env);
  REQUIRE(r.menu.size() == 1);
  CHECK(r.menu.items()[0].quantity == Approx(1.0).margin(1e-9));
  CHECK(r.menu.items()[0].price == Approx(0.5).margin(1e-9));
  CHECK(r.optimal_value == Approx(0.25).margin(1e-9));
}

TEST_CASE("screening with quadratic cost follows the pointwise first-order condition")
{
  const auto env = eom::Environment::separable(eom::TypeSpace(0, 1), 1.0, [](double x) { return x; },
                                               [](double x) { return 0.5 * x * x; });
  const auto r = eom::optimal_screening_menu(Cdf::uniform(0, 1), env);
  // psi_bar(0.75) = 0.5, so x* = psi_bar * theta = 0.375.
  CHECK(eom::consumer_choice(r.menu, 0.75, env).quantity == Approx(0.375).margin(2e-3));
  // Types with a negative virtual value are excluded.
  CHECK(eom::consumer_choice(r.menu, 0.45, env).quantity == 0.0);
  CHECK(r.optimal_value == Approx(eom::expected_profit(r.menu, Cdf::uniform(0, 1), env)).margin(1e-9));
  // Quantities are nondecreasing in type.
  double prev = 0.0;
  for (double theta : eom::numeric::linspace(0, 1, 501)) {
    const double q = eom::consumer_choice(r.menu, theta, env).quantity;
    CHECK(q >= prev);
    prev = q;
  }
}

TEST_CASE("value function is Lipschitz with L = 4")
{
  eom::Stream rng(32);
  const auto env = testing::unit_linear();
  int violations = 0;
  for (int i = 0; i < 500; ++i) {
    const auto F = testing::random_cdf(rng), G = testing::random_cdf(rng);
    const double gap = std::fabs(eom::optimal_profit(F, env).optimal_value - eom::optimal_profit(G, env).optimal_value);
    if (gap > 4.0 * eom::sup_distance(F, G) + 1e-8) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("value function dominates every menu")
{
  eom::Stream rng(33);
  const auto env = testing::unit_linear(0.1);
  for (int i = 0; i < 30; ++i) {
    const auto F = testing::random_cdf(rng);
    const double Pi = eom::optimal_profit(F, env).optimal_value;
    for (int j = 0; j < 100; ++j) CHECK(Pi >= eom::expected_profit(testing::random_menu(rng), F, env) - 1e-9);
  }
}

TEST_CASE("directional derivative of the value function is the profit of the optimal menu")
{
  eom::Stream rng(34);
  const auto env = testing::unit_linear();
  const double L = 4.0, t = 1e-3;
  for (int i = 0; i < 50; ++i) {
    const auto F = testing::random_cdf(rng), G = testing::random_cdf(rng);
    const auto Ft = Cdf::mixture({1.0 - t, t}, {F, G});
    const auto solved = eom::optimal_profit(F, env);
    const double fd = (eom::optimal_profit(Ft, env).optimal_value - solved.optimal_value) / t;
    const double derivative = eom::expected_profit(solved.menu, G, env) - eom::expected_profit(solved.menu, F, env);
    CHECK(std::fabs(fd - derivative) <= 0.05 * L);
  }
}

TEST_CASE("empirically optimal prices approach the optimum as n grows")
{
  const auto env = testing::unit_linear();
  const std::vector<std::size_t> sizes{10, 100, 1000, 10000};
  for (const auto& F0 : {Cdf::beta(0.25, 0.25), Cdf::uniform(0, 1), Cdf::beta(4, 4)}) {
    const double Pi = eom::optimal_profit(F0, env).optimal_value;
    std::vector<std::vector<double>> regret(sizes.size());
    for (int r = 0; r < 200; ++r) {
      eom::Stream stream(35, {static_cast<std::uint64_t>(r)});
      std::vector<double> draws(sizes.back());
      for (auto& x : draws) x = eom::quantile(F0, stream.uniform01());
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        const Sample s(std::vector<double>(draws.begin(), draws.begin() + sizes[k]));
        const auto menu = eom::optimal_profit(eom::ecdf(s), env).menu;
        regret[k].push_back(Pi - eom::expected_profit(menu, F0, env));
      }
    }
    std::vector<double> medians;
    for (auto& v : regret) {
      for (double x : v) CHECK(x >= -1e-9);
      std::sort(v.begin(), v.end());
      medians.push_back(eom::numeric::quantile_type7(v, 0.5));
    }
    for (std::size_t k = 1; k < medians.size(); ++k) CHECK(medians[k] < medians[k - 1]);
    CHECK(medians.back() < 0.01);
  }
}
