#pragma once

#include "eom/distributions.hpp"
#include "eom/environment.hpp"
#include "eom/errors.hpp"
#include "eom/inference.hpp"
#include "eom/mechanisms.hpp"
#include "eom/numeric.hpp"
#include "eom/rng.hpp"
#include "eom/solvers.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace eom {

enum class McTarget
{
  FixedProfitCoverage,
  OptimalProfitCoverage,
  RegretShare
};

inline const char* to_string(McTarget t)
{
  switch (t) {
    case McTarget::FixedProfitCoverage: return "fixed_coverage";
    case McTarget::OptimalProfitCoverage: return "optimal_coverage";
    case McTarget::RegretShare: return "regret_share";
  }
  return "?";
}

inline McTarget parse_mc_target(const std::string& s)
{
  if (s == "fixed_coverage") return McTarget::FixedProfitCoverage;
  if (s == "optimal_coverage") return McTarget::OptimalProfitCoverage;
  if (s == "regret_share") return McTarget::RegretShare;
  throw std::invalid_argument("unknown target '" + s + "' (expected fixed_coverage, optimal_coverage or regret_share)");
}

struct McConfig
{
  std::vector<Cdf> distributions;
  Menu fixed_menu{{{1.0, 0.5}}};
  std::vector<std::size_t> sample_sizes{500, 1000, 2500};
  std::size_t replications = 1000;
  std::size_t bootstrap_draws = 1000;
  std::vector<double> levels{0.90, 0.95, 0.99};
  std::uint64_t seed = 0;
  McTarget target = McTarget::FixedProfitCoverage;
  double c_bar = 0.0;
  double type_lower = 0.0;
  double type_upper = 1.0;
  Estimator estimator = Estimator::Ecdf;
  std::size_t workers = 1;
};

// Coverage tables use N in {500, 1000, 2500}; regret curves use n = 10, 20, ..., 300.
inline std::vector<std::size_t> default_sample_sizes(McTarget target)
{
  if (target != McTarget::RegretShare) return {500, 1000, 2500};
  std::vector<std::size_t> out;
  for (std::size_t n = 10; n <= 300; n += 10) out.push_back(n);
  return out;
}

struct McRow
{
  std::string dist;
  std::size_t n = 0;
  double level = std::numeric_limits<double>::quiet_NaN();  // coverage rows only
  std::size_t R = 0;
  std::size_t B = 0;                                         // coverage rows only
  double value = 0.0;  // coverage, or mean regret share
  double mc_se = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const McRow&, const McRow&) = default;
};

struct McResult
{
  McTarget target = McTarget::FixedProfitCoverage;
  std::vector<McRow> rows;
};

inline void validate(const McConfig& cfg)
{
  if (cfg.distributions.empty()) throw std::invalid_argument("config lists no distributions");
  if (cfg.sample_sizes.empty()) throw std::invalid_argument("config lists no sample sizes");
  for (auto n : cfg.sample_sizes) {
    if (n < 1) throw std::invalid_argument("sample sizes must be >= 1");
  }
  if (cfg.replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (cfg.target != McTarget::RegretShare) {
    if (cfg.bootstrap_draws < 100) throw std::invalid_argument("bootstrap draws must be >= 100");
    if (cfg.levels.empty()) throw std::invalid_argument("coverage targets need at least one level");
    for (double l : cfg.levels) {
      if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("levels must lie in (0, 1)");
    }
  }
}

inline Environment experiment_environment(const McConfig& cfg)
{
  return Environment::linear_unit_demand(TypeSpace(cfg.type_lower, cfg.type_upper), cfg.c_bar);
}

struct TrueValues
{
  double profit;   // pi(menu, F0)
  double optimal;  // Pi(F0)
};

// Ground truth against an analytic law.
inline TrueValues true_values(const Cdf& F, const Menu& menu, const Environment& env)
{
  if (F.as<dist::EmpiricalStep>() || F.as<dist::KernelSmoothed>()) {
    throw DomainError("true values need an analytic distribution");
  }
  return {expected_profit(menu, F, env), optimal_profit(F, env).optimal_value};
}

namespace detail {

// Runs task(i) for i in [0, count) on `workers` threads. Tasks write only to
// their own output slots, so the result does not depend on scheduling.
template <typename Task>
void parallel_for(std::size_t count, std::size_t workers, Task&& task)
{
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const auto i = next.fetch_add(1);
        if (i >= count) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(count);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

enum : std::uint64_t
{
  kSampleStream = 1,
  kBootstrapStream = 2
};

// Types for replication r of distribution d, in draw order. A sample of size
// n is the first n entries, so samples are nested across n.
inline std::vector<double> replication_draws(const Cdf& F,
                                             std::size_t count,
                                             std::uint64_t seed,
                                             std::size_t d,
                                             std::size_t r)
{
  Stream stream(seed, {kSampleStream, d, r});
  std::vector<double> out(count);
  for (auto& x : out) x = quantile(F, stream.uniform01());
  return out;
}

inline Sample prefix_sample(const std::vector<double>& draws, std::size_t n)
{
  return Sample(std::vector<double>(draws.begin(), draws.begin() + static_cast<std::ptrdiff_t>(n)));
}

inline std::uint64_t bootstrap_seed(std::uint64_t seed, std::size_t d, std::size_t k, std::size_t r)
{
  return Stream(seed, {kBootstrapStream, d, k, r}).next();
}

}  // namespace detail

// Coverage frequency of bootstrap intervals for pi(menu, F0) or Pi(F0).
inline McResult run_coverage(const McConfig& cfg)
{
  validate(cfg);
  if (cfg.target == McTarget::RegretShare) throw std::invalid_argument("run_coverage needs a coverage target");
  const auto env = experiment_environment(cfg);
  cfg.fixed_menu.check_against(env);
  const bool optimal = cfg.target == McTarget::OptimalProfitCoverage;
  const std::size_t D = cfg.distributions.size(), K = cfg.sample_sizes.size(), L = cfg.levels.size();
  const std::size_t R = cfg.replications;
  const std::size_t n_max = *std::max_element(cfg.sample_sizes.begin(), cfg.sample_sizes.end());

  std::vector<double> truth(D);
  for (std::size_t d = 0; d < D; ++d) {
    const auto tv = true_values(cfg.distributions[d], cfg.fixed_menu, env);
    truth[d] = optimal ? tv.optimal : tv.profit;
  }

  // covered[((d * K + k) * L + l) * R + r]
  std::vector<unsigned char> covered(D * K * L * R, 0);
  detail::parallel_for(D * R, cfg.workers, [&](std::size_t task) {
    const std::size_t d = task / R, r = task % R;
    const auto draws = detail::replication_draws(cfg.distributions[d], n_max, cfg.seed, d, r);
    for (std::size_t k = 0; k < K; ++k) {
      const auto s = detail::prefix_sample(draws, cfg.sample_sizes[k]);
      BootstrapOptions opt;
      opt.draws = cfg.bootstrap_draws;
      opt.seed = detail::bootstrap_seed(cfg.seed, d, k, r);
      opt.estimator = cfg.estimator;
      const auto dist = optimal ? bootstrap_optimal_distribution(s, env, opt)
                                : bootstrap_profit_distribution(cfg.fixed_menu, s, env, opt);
      for (std::size_t l = 0; l < L; ++l) {
        const auto ci = bootstrap_interval(dist, cfg.levels[l], CiMethod::Centered, opt.seed);
        // Degenerate laws give zero-width intervals; allow for rounding.
        const double slack = 1e-12 * std::max(1.0, std::fabs(truth[d]));
        covered[((d * K + k) * L + l) * R + r] = ci.ci_low - slack <= truth[d] && truth[d] <= ci.ci_high + slack;
      }
    }
  });

  McResult out{cfg.target, {}};
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t l = 0; l < L; ++l) {
        std::size_t hits = 0;
        for (std::size_t r = 0; r < R; ++r) hits += covered[((d * K + k) * L + l) * R + r];
        const double cov = static_cast<double>(hits) / static_cast<double>(R);
        out.rows.push_back({cfg.distributions[d].name(), cfg.sample_sizes[k], cfg.levels[l], R,
                            cfg.bootstrap_draws, cov, std::sqrt(cov * (1.0 - cov) / static_cast<double>(R)),
                            cfg.seed});
      }
    }
  }
  return out;
}

// Mean of (Pi(F0) - pi(M_hat, F0)) / Pi(F0) over replications, where M_hat is
// optimal for the estimated CDF of each sample.
inline McResult run_regret(const McConfig& cfg)
{
  validate(cfg);
  if (cfg.target != McTarget::RegretShare) throw std::invalid_argument("run_regret needs the regret_share target");
  const auto env = experiment_environment(cfg);
  const std::size_t D = cfg.distributions.size(), K = cfg.sample_sizes.size(), R = cfg.replications;
  const std::size_t n_max = *std::max_element(cfg.sample_sizes.begin(), cfg.sample_sizes.end());

  std::vector<double> optimum(D);
  for (std::size_t d = 0; d < D; ++d) {
    optimum[d] = true_values(cfg.distributions[d], cfg.fixed_menu, env).optimal;
    if (!(optimum[d] > 0.0)) throw DomainError("regret share needs a positive optimal profit");
  }

  // share[(d * K + k) * R + r]
  std::vector<double> share(D * K * R, 0.0);
  detail::parallel_for(D * R, cfg.workers, [&](std::size_t task) {
    const std::size_t d = task / R, r = task % R;
    const auto& F0 = cfg.distributions[d];
    const auto draws = detail::replication_draws(F0, n_max, cfg.seed, d, r);
    BootstrapOptions est;
    est.estimator = cfg.estimator;
    for (std::size_t k = 0; k < K; ++k) {
      const auto s = detail::prefix_sample(draws, cfg.sample_sizes[k]);
      const auto menu = optimal_profit(detail::estimate_cdf(s, est, env), env).menu;
      const double regret = optimum[d] - expected_profit(menu, F0, env);
      share[(d * K + k) * R + r] = std::max(0.0, regret) / optimum[d];
    }
  });

  McResult out{cfg.target, {}};
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t k = 0; k < K; ++k) {
      const std::span<const double> cell(share.data() + (d * K + k) * R, R);
      const double mean = numeric::mean(cell);
      const double se = R > 1 ? numeric::sample_sd(cell) / std::sqrt(static_cast<double>(R)) : 0.0;
      McRow row{cfg.distributions[d].name(), cfg.sample_sizes[k], std::numeric_limits<double>::quiet_NaN(), R, 0,
                mean, se, cfg.seed};
      out.rows.push_back(row);
    }
  }
  return out;
}

inline McResult run_experiment(const McConfig& cfg)
{
  return cfg.target == McTarget::RegretShare ? run_regret(cfg) : run_coverage(cfg);
}

// Running median over a centered window, shrunk at the ends.
inline std::vector<double> median_smooth(std::span<const double> xs, std::size_t window = 5)
{
  std::vector<double> out(xs.size());
  const std::size_t half = window / 2;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(xs.size(), i + half + 1);
    std::vector<double> w(xs.begin() + static_cast<std::ptrdiff_t>(lo), xs.begin() + static_cast<std::ptrdiff_t>(hi));
    std::sort(w.begin(), w.end());
    out[i] = numeric::quantile_type7(w, 0.5);
  }
  return out;
}

namespace detail {

inline std::string csv_number(double x)
{
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

}  // namespace detail

inline void write_csv(std::ostream& os, const McResult& result)
{
  using detail::csv_number;
  if (result.target == McTarget::RegretShare) {
    os << "dist,n,R,mean_regret_share,mc_se,seed\n";
    for (const auto& row : result.rows) {
      os << row.dist << ',' << row.n << ',' << row.R << ',' << csv_number(row.value) << ','
         << csv_number(row.mc_se) << ',' << row.seed << '\n';
    }
    return;
  }
  os << "dist,n,level,R,B,coverage,mc_se,seed\n";
  for (const auto& row : result.rows) {
    os << row.dist << ',' << row.n << ',' << csv_number(row.level) << ',' << row.R << ',' << row.B << ','
       << csv_number(row.value) << ',' << csv_number(row.mc_se) << ',' << row.seed << '\n';
  }
}

}  // namespace eom
