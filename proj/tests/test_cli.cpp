#include "catch_amalgamated.hpp"
#include "support.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using Catch::Approx;
using nlohmann::json;

namespace {

struct Run
{
  int code = -1;
  std::string out;
};

Run run(const std::string& args)
{
  const std::string cmd = std::string(EOM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json run_json(const std::string& args)
{
  const auto r = run(args);
  INFO(args);
  REQUIRE(r.code == 0);
  return json::parse(r.out);
}

std::string write_file(const std::string& name, const std::string& text)
{
  std::ofstream(name) << text;
  return name;
}

std::string write_sample(const std::string& name, const eom::Sample& s)
{
  std::ofstream out(name);
  eom::io::write_sample(out, s);
  return name;
}

}  // namespace

TEST_CASE("solve on a small sample")
{
  const auto path = write_file("cli_three.csv", "0.3\n0.5\n0.9\n");
  const auto j = run_json("solve --sample " + path);
  CHECK(j.at("optimal_value").get<double>() == 1.0 / 3.0);
  CHECK(j.at("price").get<double>() == 0.5);
  REQUIRE(j.at("items").size() == 1);
  CHECK(j.at("items")[0].at("p").get<double>() == 0.5);
}

TEST_CASE("solve output matches the library bit for bit")
{
  const auto s = eom::draw_sample(eom::Cdf::beta(2, 3), 300, 41);
  const auto path = write_sample("cli_beta.csv", s);
  const auto env = testing::unit_linear(0.1);
  for (const std::string est : {"ecdf", "interp"}) {
    const auto j = run_json("solve --sample " + path + " --cost 0.1 --estimator " + est);
    const auto F = est == "ecdf" ? eom::ecdf(s) : eom::interp_ecdf(s, 0.0);
    CHECK(j.at("optimal_value").get<double>() == eom::optimal_profit(F, env).optimal_value);
  }
  const auto j = run_json("solve --dist uniform:0:1");
  CHECK(j.at("optimal_value").get<double>() == eom::optimal_profit(eom::Cdf::uniform(0, 1), testing::unit_linear()).optimal_value);
}

TEST_CASE("separable screening from the command line")
{
  const auto j = run_json("solve --dist uniform:0:1 --env separable --benefit power:0.5 --cost-fn quadratic:1");
  CHECK(j.at("method").get<std::string>() != "");
  CHECK(j.at("optimal_value").get<double>() > 0.0);
}

TEST_CASE("bound examples")
{
  const auto j = run_json("bound --kind dkw --n 100 --delta 0.1");
  CHECK(j.at("bound").get<double>() == Approx(2.0 * std::exp(-2.0)));
  CHECK(j.at("regret").at("bound").get<double>() == j.at("bound").get<double>());
  CHECK(run_json("bound --kind dkw --delta 0.1 --L 1 --alpha 0.05 --samples-needed").at("samples_needed").get<std::uint64_t>() == 185);
  CHECK(run_json("bound --kind interp --delta 0.1 --L 1 --alpha 0.05 --samples-needed").at("samples_needed").get<std::uint64_t>() == 204);
  const auto k = run_json("bound --kind kernel --n 1000 --delta 0.5 --bandwidth 0.1");
  CHECK(k.at("bound").get<double>() >= 0.0);
}

TEST_CASE("inference output matches the library bit for bit")
{
  const auto s = eom::draw_sample(eom::Cdf::uniform(0, 1), 200, 42);
  const auto path = write_sample("cli_unif.csv", s);
  const auto menu = write_file("cli_menu.json", R"({"items":[{"x":1.0,"p":0.5}]})");
  const auto empty = write_file("cli_empty.json", R"({"items":[]})");
  const auto env = testing::unit_linear();
  const eom::Menu m({{1.0, 0.5}});
  eom::BootstrapOptions opt;
  opt.seed = 5;
  opt.draws = 200;

  auto j = run_json("infer --sample " + path + " --menu " + menu + " --seed 5 --draws 200");
  auto e = eom::bootstrap_ci_profit(m, s, env, opt);
  CHECK(j.at("point").get<double>() == e.point);
  CHECK(j.at("ci_low").get<double>() == e.ci_low);
  CHECK(j.at("ci_high").get<double>() == e.ci_high);
  CHECK(j.at("std_error").get<double>() == e.std_error);

  j = run_json("infer --target optimal --sample " + path + " --seed 5 --draws 200");
  e = eom::bootstrap_ci_optimal_profit(s, env, opt);
  CHECK(j.at("ci_low").get<double>() == e.ci_low);
  CHECK(j.at("ci_high").get<double>() == e.ci_high);

  j = run_json("infer --target regret --sample " + path + " --menu " + menu + " --seed 5 --draws 200");
  e = eom::bootstrap_ci_regret(m, s, env, opt);
  CHECK(j.at("ci_high").get<double>() == e.ci_high);

  j = run_json("infer --target compare --sample " + path + " --menu " + menu + " --menu-b " + empty +
               " --seed 5 --draws 200");
  CHECK(j.at("reject_equal").get<bool>());

  j = run_json("infer --method plugin --sample " + path + " --menu " + menu + " --seed 1");
  CHECK(j.at("std_error").get<double>() == eom::plugin_ci_profit(m, s, env, 0.95).std_error);
}

TEST_CASE("auction examples")
{
  auto j = run_json("auction --dist uniform:0:1 --bidders 2 --solve");
  CHECK(j.at("reserve").get<double>() == Approx(0.5).margin(1e-6));
  CHECK(j.at("value").get<double>() == Approx(5.0 / 12.0).epsilon(1e-12));
  CHECK(j.at("L").get<double>() == 4.0);
  j = run_json("auction --dist uniform:0:1 --bidders 2 --solve --seller-value 0.2");
  CHECK(j.at("reserve").get<double>() == Approx(0.6).margin(1e-6));
  j = run_json("auction --dist uniform:0:1 --bidders 2 --reserve 0 --mode literal");
  CHECK(j.at("value").get<double>() == 1.0);
  const auto ties = write_file("cli_ties.csv", "0.2\n0.2\n0.7\n");
  CHECK(run("auction --sample " + ties + " --bidders 2 --solve").code == 1);
  CHECK(run("auction --sample " + ties + " --bidders 2 --solve --merge-ties").code == 0);
}

TEST_CASE("estimate evaluates the CDF")
{
  const auto path = write_file("cli_three_b.csv", "0.3\n0.5\n0.9\n");
  const auto j = run_json("estimate --sample " + path + " --at 0.4 --at 0.95");
  CHECK(j.at("points")[0].at("F").get<double>() == Approx(1.0 / 3.0));
  CHECK(j.at("points")[1].at("F").get<double>() == 1.0);
  const auto k = run_json("estimate --sample " + path + " --estimator kernel --bandwidth 0.2 --grid 11");
  CHECK(k.at("points").size() == 11);
  CHECK(k.at("bandwidth").get<double>() == 0.2);
}

TEST_CASE("exit codes")
{
  const auto path = write_file("cli_three_c.csv", "0.3\n0.5\n0.9\n");
  const auto bad = write_file("cli_bad.csv", "0.3\nzz\n");
  const auto menu = write_file("cli_menu_b.json", R"({"items":[{"x":1.0,"p":0.5}]})");
  CHECK(run("").code == 2);
  CHECK(run("solve --sample /nonexistent.csv").code == 2);
  CHECK(run("solve --sample " + bad).code == 2);
  CHECK(run("solve").code == 2);
  CHECK(run("infer --sample " + path + " --menu " + menu).code == 2);  // missing --seed
  CHECK(run("infer --sample " + path + " --menu " + menu + " --seed 1 --draws 10").code == 2);
  CHECK(run("bound --kind dkw --n 10").code == 2);
  CHECK(run("auction --dist uniform:0:1 --bidders 2").code == 2);
  CHECK(run("simulate --dist uniform:0:1 --n 10 --replications 2").code == 2);  // missing --seed
  CHECK(run("solve --dist gamma:1:1").code == 2);
  CHECK(run("solve --sample " + path + " --estimator interp --theta-min 0.3").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("simulate output does not depend on the worker count")
{
  const std::string base =
    "simulate --target regret_share --dist uniform:0:1 --dist beta:4:4 --n 20 --n 40 --replications 8 --seed 3";
  const auto one = run(base + " --workers 1");
  REQUIRE(one.code == 0);
  CHECK(one.out.rfind("dist,n,R,mean_regret_share,mc_se,seed\n", 0) == 0);
  CHECK(run(base + " --workers 4").out == one.out);

  const std::string cov = "simulate --dist uniform:0:1 --n 30 --replications 5 --draws 100 --level 0.9 --seed 3";
  const auto c1 = run(cov);
  REQUIRE(c1.code == 0);
  CHECK(run(cov + " --workers 3").out == c1.out);

  eom::McConfig cfg;
  cfg.distributions = {eom::Cdf::uniform(0, 1)};
  cfg.sample_sizes = {30};
  cfg.replications = 5;
  cfg.bootstrap_draws = 100;
  cfg.levels = {0.9};
  cfg.seed = 3;
  std::ostringstream lib;
  eom::write_csv(lib, eom::run_experiment(cfg));
  CHECK(c1.out == lib.str());

  const auto config = write_file("cli_sim.json", R"({"distributions":["uniform:0:1"],"sample_sizes":[30],
    "replications":5,"bootstrap_draws":100,"levels":[0.9],"seed":3})");
  CHECK(run("simulate --config " + config).out == c1.out);
  CHECK(run("simulate --config " + config + " --output cli_sim_out.csv").code == 0);
  std::ifstream in("cli_sim_out.csv");
  std::stringstream file;
  file << in.rdbuf();
  CHECK(file.str() == c1.out);
}
