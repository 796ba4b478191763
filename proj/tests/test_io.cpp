#include "catch_amalgamated.hpp"
#include "support.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

using Catch::Approx;
using eom::io::InputError;

TEST_CASE("number parsing is strict")
{
  CHECK(eom::io::parse_number(" 0.25 ") == 0.25);
  CHECK(eom::io::parse_number("1e-3") == 0.001);
  CHECK_THROWS_AS(eom::io::parse_number("0.25x"), InputError);
  CHECK_THROWS_AS(eom::io::parse_number(""), InputError);
  CHECK_THROWS_AS(eom::io::parse_number("nan"), InputError);
}

TEST_CASE("sample parsing")
{
  std::istringstream plain("0.5\n0.1\n\n0.9\n");
  const auto s = eom::io::parse_sample(plain);
  CHECK(s.size() == 3);
  CHECK(s.values().front() == 0.1);
  std::istringstream with_header("theta,other\n0.3,7\n0.2,8\n");
  CHECK(eom::io::parse_sample(with_header, true).size() == 2);
  std::istringstream bad("0.3\nabc\n");
  CHECK_THROWS_AS(eom::io::parse_sample(bad), InputError);
  std::istringstream empty("");
  CHECK_THROWS_AS(eom::io::parse_sample(empty), InputError);
  CHECK_THROWS_AS(eom::io::read_sample("/nonexistent/file.csv"), InputError);
}

TEST_CASE("samples round-trip bit for bit")
{
  eom::Stream rng(31);
  const auto s = eom::draw_sample(eom::Cdf::beta(0.25, 0.25), 200, rng);
  std::stringstream buf;
  eom::io::write_sample(buf, s);
  CHECK(eom::io::parse_sample(buf).values().size() == s.size());
  std::stringstream again;
  eom::io::write_sample(again, s);
  const auto back = eom::io::parse_sample(again);
  CHECK(std::equal(back.values().begin(), back.values().end(), s.values().begin(), s.values().end()));
}

TEST_CASE("distribution specs")
{
  const auto u = eom::io::parse_distribution("uniform:0:1");
  CHECK(u(0.25) == 0.25);
  const auto b = eom::io::parse_distribution("beta:2:2");
  CHECK(b(0.5) == Approx(0.5));
  const auto scaled = eom::io::parse_distribution("beta:1:1:2:4");
  CHECK(scaled(3.0) == Approx(0.5));
  CHECK(eom::io::parse_distribution("point:0.4")(0.4) == 1.0);
  const auto mix = eom::io::parse_distribution("mixture[0.5*uniform:0:1+0.5*point:0.5]");
  CHECK(mix(0.5) == Approx(0.75));
  CHECK_THROWS_AS(eom::io::parse_distribution("gamma:1:2"), InputError);
  CHECK_THROWS_AS(eom::io::parse_distribution("uniform:1:0"), InputError);
  CHECK_THROWS_AS(eom::io::parse_distribution("mixture[1*mixture[1*point:0]]"), InputError);
}

TEST_CASE("environment specs")
{
  eom::io::EnvironmentSpec spec;
  spec.c_bar = 0.2;
  const auto env = eom::io::make_environment(spec);
  CHECK(env.types().lower() == 0.0);
  spec.kind = "separable";
  spec.cost = "linear:0.1";
  CHECK_NOTHROW(eom::io::make_environment(spec));
  spec.benefit = "power:-1";
  CHECK_THROWS_AS(eom::io::make_environment(spec), InputError);
  spec = {};
  spec.kind = "other";
  CHECK_THROWS_AS(eom::io::make_environment(spec), InputError);
  const auto parsed = eom::io::environment_spec_from_json(nlohmann::json{{"kind", "separable"}, {"x_max", 2.0}});
  CHECK(parsed.kind == "separable");
  CHECK(parsed.x_max == 2.0);
  CHECK_THROWS_AS(eom::io::environment_spec_from_json(nlohmann::json{{"x_max", "wide"}}), InputError);
}

TEST_CASE("menus round-trip through JSON")
{
  const eom::Menu m({{0.5, 0.2}, {1.0, 0.55}});
  const auto j = eom::io::to_json(m);
  CHECK(j.at("items").size() == 2);
  const auto back = eom::io::menu_from_json(nlohmann::json::parse(j.dump()));
  CHECK(std::ranges::equal(back.items(), m.items()));
  CHECK_THROWS_AS(eom::io::menu_from_json(nlohmann::json{{"items", {{{"x", 1.0}}}}}), InputError);
  CHECK_THROWS_AS(eom::io::read_menu("/nonexistent/menu.json"), InputError);
}

TEST_CASE("doubles survive JSON serialization")
{
  eom::Stream rng(32);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform01() * std::pow(10.0, static_cast<double>(rng.below(20)) - 10.0);
    CHECK(nlohmann::json::parse(nlohmann::json(x).dump()).get<double>() == x);
  }
}

TEST_CASE("result serialization")
{
  const auto env = testing::unit_linear();
  const auto r = eom::optimal_profit(eom::ecdf(eom::Sample({0.3, 0.5, 0.9})), env);
  const auto j = eom::io::to_json(r);
  CHECK(j.at("optimal_value").get<double>() == r.optimal_value);
  CHECK(j.at("items").size() == 1);
  const auto g = eom::regret_guarantee(eom::BoundKind::dkw(), 100, 0.1, 1.0).first;
  CHECK(eom::io::to_json(g).at("bound").get<double>() == g.bound);
}

TEST_CASE("experiment configs")
{
  const auto j = nlohmann::json::parse(R"({
    "target": "regret_share",
    "distributions": ["uniform:0:1", "beta:0.25:0.25"],
    "sample_sizes": [10, 20],
    "replications": 5,
    "seed": 42,
    "estimator": "interp",
    "workers": 2
  })");
  const auto cfg = eom::io::mc_config_from_json(j);
  CHECK(cfg.target == eom::McTarget::RegretShare);
  CHECK(cfg.distributions.size() == 2);
  CHECK(cfg.sample_sizes == std::vector<std::size_t>{10, 20});
  CHECK(cfg.seed == 42);
  CHECK(cfg.estimator == eom::Estimator::InterpEcdf);
  CHECK(cfg.workers == 2);
  auto no_sizes = j;
  no_sizes.erase("sample_sizes");
  CHECK(eom::io::mc_config_from_json(no_sizes).sample_sizes.size() == 30);
  no_sizes["target"] = "fixed_coverage";
  CHECK(eom::io::mc_config_from_json(no_sizes).sample_sizes == std::vector<std::size_t>{500, 1000, 2500});
  auto missing_seed = j;
  missing_seed.erase("seed");
  CHECK_THROWS_AS(eom::io::mc_config_from_json(missing_seed), InputError);
  auto bad_estimator = j;
  bad_estimator["estimator"] = "kernel";
  CHECK_THROWS_AS(eom::io::mc_config_from_json(bad_estimator), InputError);
}
