#include "eom/eom.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using eom::io::json;

// Exit codes.
constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kUsage = 2;

struct EnvOptions
{
  eom::io::EnvironmentSpec spec;
  std::string config;
};

void add_env_options(CLI::App* app, EnvOptions& o)
{
  app->add_option("--env", o.spec.kind, "Environment kind: linear or separable")
    ->check(CLI::IsMember({"linear", "separable"}));
  app->add_option("--cost", o.spec.c_bar, "Unit cost c_bar (linear environment)")->check(CLI::NonNegativeNumber);
  app->add_option("--theta-min", o.spec.theta_min, "Lower end of the type space");
  app->add_option("--theta-max", o.spec.theta_max, "Upper end of the type space");
  app->add_option("--x-max", o.spec.x_max, "Largest quantity");
  app->add_option("--benefit", o.spec.benefit, "Separable benefit b(x): linear or power:a");
  app->add_option("--cost-fn", o.spec.cost, "Separable cost c(x): linear:c or quadratic:k");
  app->add_option("--env-config", o.config, "Environment JSON (overrides the flags above)")->check(CLI::ExistingFile);
}

eom::Environment build_env(const EnvOptions& o)
{
  if (!o.config.empty()) return eom::io::make_environment(eom::io::environment_spec_from_json(eom::io::read_json_file(o.config)));
  return eom::io::make_environment(o.spec);
}

struct SampleOptions
{
  std::string path;
  bool header = false;
};

void add_sample_option(CLI::App* app, SampleOptions& o, bool required)
{
  auto* opt = app->add_option("--sample", o.path, "Sample file, one value per line")->check(CLI::ExistingFile);
  if (required) opt->required();
  app->add_flag("--header", o.header, "Sample file starts with a header line");
}

eom::Estimator parse_estimator(const std::string& s)
{
  return s == "interp" ? eom::Estimator::InterpEcdf : eom::Estimator::Ecdf;
}

// Estimated CDF per --estimator.
eom::Cdf estimate(const eom::Sample& s,
                  const std::string& estimator,
                  double theta_lower,
                  bool merge_ties,
                  const std::string& kernel,
                  std::optional<double> bandwidth)
{
  if (estimator == "ecdf") return eom::ecdf(s);
  if (estimator == "interp") {
    return eom::interp_ecdf(s, theta_lower, merge_ties ? eom::TiePolicy::Merge : eom::TiePolicy::Reject);
  }
  const auto spec = eom::KernelSpec::of(eom::parse_kernel_shape(kernel));
  return eom::kernel_cdf(s, spec, bandwidth.value_or(eom::default_bandwidth(s.size())));
}

void emit(const json& j)
{
  std::cout << j.dump(2) << '\n';
}

// ------------------------------------------------------------------ estimate

struct EstimateCmd
{
  SampleOptions sample;
  EnvOptions env;
  std::string estimator = "ecdf";
  std::string kernel = "epanechnikov";
  std::optional<double> bandwidth;
  bool merge_ties = false;
  std::vector<double> at;
  std::size_t grid = 101;

  void attach(CLI::App& root)
  {
    auto* app = root.add_subcommand("estimate", "Estimate the type CDF from a sample");
    add_sample_option(app, sample, true);
    add_env_options(app, env);
    app->add_option("--estimator", estimator, "ecdf, interp or kernel")
      ->check(CLI::IsMember({"ecdf", "interp", "kernel"}));
    app->add_option("--kernel", kernel, "Kernel shape: uniform, triangle or epanechnikov");
    app->add_option("--bandwidth", bandwidth, "Kernel bandwidth (default n^(-1/3))")->check(CLI::PositiveNumber);
    app->add_flag("--merge-ties", merge_ties, "Interpolate through distinct values when the sample has ties");
    app->add_option("--at", at, "Evaluate the estimate at these types");
    app->add_option("--grid", grid, "Evaluation grid size when --at is absent")->check(CLI::Range(2, 1000000));
    app->callback([this] { run(); });
  }

  void run()
  {
    const auto s = eom::io::read_sample(sample.path, sample.header);
    const auto e = build_env(env);
    const auto F = estimate(s, estimator, e.types().lower(), merge_ties, kernel, bandwidth);
    auto points = at;
    if (points.empty()) points = eom::numeric::linspace(e.types().lower(), e.types().upper(), grid);
    json rows = json::array();
    for (double t : points) rows.push_back({{"theta", t}, {"F", F(t)}});
    json out{{"estimator", estimator}, {"n", s.size()}, {"cdf", F.name()}, {"points", rows}};
    if (const auto* k = F.as<eom::dist::KernelSmoothed>()) out["bandwidth"] = k->h;
    emit(out);
  }
};

// --------------------------------------------------------------------- solve

struct SolveCmd
{
  SampleOptions sample;
  EnvOptions env;
  std::string dist;
  std::string estimator = "ecdf";
  std::string kernel = "epanechnikov";
  std::optional<double> bandwidth;
  bool merge_ties = false;
  eom::SolverOptions solver;

  void attach(CLI::App& root)
  {
    auto* app = root.add_subcommand("solve", "Optimal menu and profit for an estimated or analytic type law");
    add_sample_option(app, sample, false);
    add_env_options(app, env);
    auto* d = app->add_option("--dist", dist, "Analytic law instead of a sample, e.g. uniform:0:1 or beta:4:4");
    d->excludes(app->get_option("--sample"));
    app->add_option("--estimator", estimator, "ecdf, interp or kernel")
      ->check(CLI::IsMember({"ecdf", "interp", "kernel"}));
    app->add_option("--kernel", kernel, "Kernel shape: uniform, triangle or epanechnikov");
    app->add_option("--bandwidth", bandwidth, "Kernel bandwidth (default n^(-1/3))")->check(CLI::PositiveNumber);
    app->add_flag("--merge-ties", merge_ties, "Interpolate through distinct values when the sample has ties");
    app->add_option("--price-grid", solver.price_grid, "Grid size for continuous uniform pricing")
      ->check(CLI::Range(2, 100000000));
    app->add_option("--ironing-segments", solver.ironing_segments, "Quantile segments for ironing")
      ->check(CLI::Range(2, 100000000));
    app->callback([this] { run(); });
  }

  void run()
  {
    if (sample.path.empty() && dist.empty()) throw CLI::RequiredError("--sample or --dist");
    const auto e = build_env(env);
    const auto F = dist.empty()
                     ? estimate(eom::io::read_sample(sample.path, sample.header), estimator, e.types().lower(),
                                merge_ties, kernel, bandwidth)
                     : eom::io::parse_distribution(dist);
    emit(eom::io::to_json(eom::optimal_profit(F, e, solver)));
  }
};

// --------------------------------------------------------------------- bound

struct BoundCmd
{
  std::string kind = "dkw";
  std::uint64_t n = 0;
  double delta = 0.0;
  double L = 1.0;
  double alpha = 0.05;
  bool samples_needed = false;
  double variation = 1.0;
  std::string kernel = "epanechnikov";
  double bandwidth = 0.1;
  std::string reading = "scaled";
  CLI::App* app = nullptr;

  void attach(CLI::App& root)
  {
    app = root.add_subcommand("bound", "Finite-sample profit and regret guarantees");
    app->add_option("--kind", kind, "dkw, interp or kernel")->check(CLI::IsMember({"dkw", "interp", "kernel"}));
    app->add_option("--n", n, "Sample size")->check(CLI::PositiveNumber);
    app->add_option("--delta", delta, "Deviation delta")->required()->check(CLI::PositiveNumber);
    app->add_option("--L", L, "Lipschitz constant (1 gives the bare CDF deviation bound)")->check(CLI::PositiveNumber);
    app->add_option("--alpha", alpha, "Target failure probability for --samples-needed");
    app->add_flag("--samples-needed", samples_needed, "Report the smallest n with bound <= alpha");
    app->add_option("--variation", variation, "Density total-variation bound B (kernel)")->check(CLI::PositiveNumber);
    app->add_option("--kernel", kernel, "Kernel shape (kernel)");
    app->add_option("--bandwidth", bandwidth, "Bandwidth h (kernel)")->check(CLI::PositiveNumber);
    app->add_option("--reading", reading, "Kernel radius reading: scaled (L q) or divided (q / L)")
      ->check(CLI::IsMember({"scaled", "divided"}));
    app->callback([this] { run(); });
  }

  eom::BoundKind bound_kind() const
  {
    if (kind == "dkw") return eom::BoundKind::dkw();
    if (kind == "interp") return eom::BoundKind::interp_ecdf();
    return eom::BoundKind::kernel_deterministic(variation, eom::KernelSpec::of(eom::parse_kernel_shape(kernel)),
                                                bandwidth);
  }

  void run()
  {
    const auto k = bound_kind();
    if (samples_needed) {
      const auto N = eom::sample_complexity(k, delta, alpha, L);
      emit({{"kind", kind}, {"delta", delta}, {"alpha", alpha}, {"L", L}, {"samples_needed", N}});
      return;
    }
    if (n == 0) throw CLI::RequiredError("--n");
    const auto reading_enum =
      reading == "scaled" ? eom::KernelRadiusReading::ScaledByL : eom::KernelRadiusReading::DividedByL;
    const auto [profit, regret] = eom::regret_guarantee(k, n, delta, L, reading_enum);
    json out = eom::io::to_json(profit);
    out["kind"] = kind;
    out["regret"] = eom::io::to_json(regret);
    emit(out);
  }
};

// --------------------------------------------------------------------- infer

struct InferCmd
{
  SampleOptions sample;
  EnvOptions env;
  std::string target = "profit";
  std::string menu_path;
  std::string menu_b_path;
  std::size_t draws = 1000;
  double level = 0.95;
  std::optional<std::uint64_t> seed;
  std::string method = "bootstrap";
  std::string ci = "centered";
  std::string estimator = "ecdf";

  void attach(CLI::App& root)
  {
    auto* app = root.add_subcommand("infer", "Bootstrap and plug-in inference on profit, optimal profit and regret");
    add_sample_option(app, sample, true);
    add_env_options(app, env);
    app->add_option("--target", target, "profit, optimal, regret or compare")
      ->check(CLI::IsMember({"profit", "optimal", "regret", "compare"}));
    app->add_option("--menu", menu_path, "Menu JSON (profit, regret, compare)")->check(CLI::ExistingFile);
    app->add_option("--menu-b", menu_b_path, "Second menu JSON (compare)")->check(CLI::ExistingFile);
    app->add_option("--draws", draws, "Bootstrap draws B (>= 100)");
    app->add_option("--level", level, "Confidence level in (0, 1)");
    app->add_option("--seed", seed, "Random seed")->required();
    app->add_option("--method", method, "bootstrap or plugin (profit target only)")
      ->check(CLI::IsMember({"bootstrap", "plugin"}));
    app->add_option("--ci", ci, "centered or percentile")->check(CLI::IsMember({"centered", "percentile"}));
    app->add_option("--estimator", estimator, "ecdf or interp")->check(CLI::IsMember({"ecdf", "interp"}));
    app->callback([this] { run(); });
  }

  eom::Menu need_menu(const std::string& path, const char* flag) const
  {
    if (path.empty()) throw CLI::RequiredError(flag);
    return eom::io::read_menu(path);
  }

  void run()
  {
    const auto s = eom::io::read_sample(sample.path, sample.header);
    const auto e = build_env(env);
    eom::BootstrapOptions opt;
    opt.draws = draws;
    opt.level = level;
    opt.seed = *seed;
    opt.ci = ci == "centered" ? eom::CiMethod::Centered : eom::CiMethod::Percentile;
    opt.estimator = parse_estimator(estimator);
    if (method == "plugin" && target != "profit") throw CLI::ValidationError("--method plugin applies to --target profit only");

    if (target == "profit") {
      const auto m = need_menu(menu_path, "--menu");
      if (method == "plugin") {
        emit(eom::io::to_json(eom::plugin_ci_profit(m, s, e, level)));
      } else {
        emit(eom::io::to_json(eom::bootstrap_ci_profit(m, s, e, opt)));
      }
    } else if (target == "optimal") {
      emit(eom::io::to_json(eom::bootstrap_ci_optimal_profit(s, e, opt)));
    } else if (target == "regret") {
      emit(eom::io::to_json(eom::bootstrap_ci_regret(need_menu(menu_path, "--menu"), s, e, opt)));
    } else {
      const auto a = need_menu(menu_path, "--menu");
      const auto b = need_menu(menu_b_path, "--menu-b");
      emit(eom::io::to_json(eom::bootstrap_compare(a, b, s, e, opt)));
    }
  }
};

// ------------------------------------------------------------------- auction

struct AuctionCmd
{
  SampleOptions sample;
  std::string dist;
  int bidders = 2;
  std::optional<double> reserve;
  bool solve = false;
  std::string mode = "standard";
  double seller_value = 0.0;
  double theta_min = 0.0;
  bool merge_ties = false;

  void attach(CLI::App& root)
  {
    auto* app = root.add_subcommand("auction", "Second-price auction with a reserve price");
    add_sample_option(app, sample, false);
    auto* d = app->add_option("--dist", dist, "Analytic bidder law instead of a sample");
    d->excludes(app->get_option("--sample"));
    app->add_option("--bidders", bidders, "Number of bidders M (>= 2)")->required();
    auto* r = app->add_option("--reserve", reserve, "Evaluate this reserve price");
    auto* sv = app->add_flag("--solve", solve, "Find the optimal reserve price");
    r->excludes(sv);
    app->add_option("--mode", mode, "standard or literal")->check(CLI::IsMember({"standard", "literal"}));
    app->add_option("--seller-value", seller_value, "Seller's value c")->check(CLI::NonNegativeNumber);
    app->add_option("--theta-min", theta_min, "Lower end of the type space (anchor of the interpolated CDF)");
    app->add_flag("--merge-ties", merge_ties, "Interpolate through distinct values when the sample has ties");
    app->callback([this] { run(); });
  }

  void run()
  {
    if (sample.path.empty() && dist.empty()) throw CLI::RequiredError("--sample or --dist");
    if (!reserve && !solve) throw CLI::RequiredError("--reserve or --solve");
    const auto F = dist.empty() ? eom::interp_ecdf(eom::io::read_sample(sample.path, sample.header), theta_min,
                                                   merge_ties ? eom::TiePolicy::Merge : eom::TiePolicy::Reject)
                                : eom::io::parse_distribution(dist);
    const eom::AuctionSetting setting(F, bidders, seller_value);
    const auto m = eom::parse_auction_mode(mode);
    json out{{"bidders", bidders}, {"mode", mode}, {"seller_value", seller_value},
             {"L", eom::auction_lipschitz_constant(bidders)}};
    if (solve) {
      const auto best = eom::optimal_reserve(setting, m);
      out["reserve"] = best.reserve;
      out["value"] = best.value;
    } else {
      out["reserve"] = *reserve;
      out["value"] = eom::auction_profit(*reserve, setting, m);
    }
    emit(out);
  }
};

// ------------------------------------------------------------------ simulate

struct SimulateCmd
{
  std::string config;
  std::string target;
  std::vector<std::string> dists;
  std::vector<std::size_t> sizes;
  std::optional<std::size_t> replications;
  std::optional<std::size_t> draws;
  std::vector<double> levels;
  std::optional<std::uint64_t> seed;
  std::string menu_path;
  std::optional<double> cost;
  std::string estimator;
  std::optional<std::size_t> workers;
  std::string output;

  void attach(CLI::App& root)
  {
    auto* app = root.add_subcommand("simulate", "Monte Carlo coverage and regret-share experiments (CSV out)");
    app->add_option("--config", config, "Experiment JSON; flags below override its entries")->check(CLI::ExistingFile);
    app->add_option("--target", target, "fixed_coverage, optimal_coverage or regret_share")
      ->check(CLI::IsMember({"fixed_coverage", "optimal_coverage", "regret_share"}));
    app->add_option("--dist", dists, "Type law (repeatable)");
    app->add_option("--n", sizes, "Sample size (repeatable)");
    app->add_option("--replications", replications, "Replications R");
    app->add_option("--draws", draws, "Bootstrap draws B");
    app->add_option("--level", levels, "Confidence level (repeatable)");
    app->add_option("--seed", seed, "Random seed (required unless the config has one)");
    app->add_option("--menu", menu_path, "Fixed menu JSON")->check(CLI::ExistingFile);
    app->add_option("--cost", cost, "Unit cost c_bar")->check(CLI::NonNegativeNumber);
    app->add_option("--estimator", estimator, "ecdf or interp")->check(CLI::IsMember({"ecdf", "interp"}));
    app->add_option("--workers", workers, "Worker threads; output does not depend on this")->check(CLI::PositiveNumber);
    app->add_option("--output", output, "Write CSV here instead of standard output");
    app->callback([this] { run(); });
  }

  void run()
  {
    json j = config.empty() ? json::object() : eom::io::read_json_file(config);
    if (!target.empty()) j["target"] = target;
    if (!dists.empty()) j["distributions"] = dists;
    if (!sizes.empty()) j["sample_sizes"] = sizes;
    if (replications) j["replications"] = *replications;
    if (draws) j["bootstrap_draws"] = *draws;
    if (!levels.empty()) j["levels"] = levels;
    if (seed) j["seed"] = *seed;
    if (!menu_path.empty()) j["menu"] = eom::io::read_json_file(menu_path);
    if (cost) j["c_bar"] = *cost;
    if (!estimator.empty()) j["estimator"] = estimator;
    if (workers) j["workers"] = *workers;
    if (!j.contains("seed")) throw CLI::RequiredError("--seed");
    if (!j.contains("distributions")) throw CLI::RequiredError("--dist");

    const auto cfg = eom::io::mc_config_from_json(j);
    const auto result = eom::run_experiment(cfg);
    std::ostringstream csv;
    eom::write_csv(csv, result);
    if (output.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream out(output);
      if (!out) throw eom::io::InputError("cannot write '" + output + "'");
      out << csv.str();
    }
  }
};

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Sample-based pricing mechanisms: estimation, solving, guarantees, inference, auctions"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  EstimateCmd estimate_cmd;
  SolveCmd solve_cmd;
  BoundCmd bound_cmd;
  InferCmd infer_cmd;
  AuctionCmd auction_cmd;
  SimulateCmd simulate_cmd;
  estimate_cmd.attach(app);
  solve_cmd.attach(app);
  bound_cmd.attach(app);
  infer_cmd.attach(app);
  auction_cmd.attach(app);
  simulate_cmd.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const eom::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const eom::io::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  }
  return kOk;
}
