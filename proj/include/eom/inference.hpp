#pragma once

#include "eom/distributions.hpp"
#include "eom/environment.hpp"
#include "eom/errors.hpp"
#include "eom/estimators.hpp"
#include "eom/mechanisms.hpp"
#include "eom/numeric.hpp"
#include "eom/rng.hpp"
#include "eom/solvers.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace eom {

enum class EstimateMethod
{
  PluginNormal,
  CenteredBootstrap,
  PercentileBootstrap
};

inline const char* to_string(EstimateMethod m)
{
  switch (m) {
    case EstimateMethod::PluginNormal: return "plugin_normal";
    case EstimateMethod::CenteredBootstrap: return "centered_bootstrap";
    case EstimateMethod::PercentileBootstrap: return "percentile_bootstrap";
  }
  return "?";
}

enum class CiMethod
{
  Centered,
  Percentile
};

enum class Estimator
{
  Ecdf,
  InterpEcdf
};

inline const char* to_string(Estimator e)
{
  return e == Estimator::Ecdf ? "ecdf" : "interp";
}

struct ProfitEstimate
{
  double point = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  EstimateMethod method = EstimateMethod::CenteredBootstrap;
  std::size_t b_draws = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ProfitEstimate&, const ProfitEstimate&) = default;
};

struct ComparisonResult
{
  double diff_point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  bool reject_equal = false;

  friend bool operator==(const ComparisonResult&, const ComparisonResult&) = default;
};

struct BootstrapOptions
{
  std::size_t draws = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  // Draw b uses the stream (seed, replicate, b); outer Monte Carlo loops set
  // replicate to their replication ordinal.
  std::uint64_t replicate = 0;
  CiMethod ci = CiMethod::Centered;
  Estimator estimator = Estimator::Ecdf;
  // Anchor for the interpolated estimator; NaN means the environment's lower type.
  double theta_lower = std::numeric_limits<double>::quiet_NaN();
  SolverOptions solver{};
};

// Statistic on the original sample plus its value on each resample.
struct BootstrapDistribution
{
  double point = 0.0;
  std::vector<double> replicates;
  std::size_t n = 0;
};

namespace detail {

inline void check_options(const BootstrapOptions& opt)
{
  if (opt.draws < 100) throw std::invalid_argument("bootstrap needs at least 100 draws");
  if (!(opt.level > 0.0 && opt.level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
}

// Multiplicity of each original observation in one n-out-of-n resample.
inline std::vector<std::uint32_t> resample_counts(std::size_t n, Stream& stream)
{
  std::vector<std::uint32_t> counts(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[stream.below(n)];
  return counts;
}

inline Sample expand(const Sample& s, std::span<const std::uint32_t> counts)
{
  std::vector<double> out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out.insert(out.end(), counts[i], s[i]);
  return Sample(std::move(out));
}

inline Cdf estimate_cdf(const Sample& s, const BootstrapOptions& opt, const Environment& env)
{
  if (opt.estimator == Estimator::Ecdf) return ecdf(s);
  const double lower = std::isnan(opt.theta_lower) ? env.types().lower() : opt.theta_lower;
  // Resamples always contain ties; interpolate between distinct jump points.
  return interp_ecdf(s, lower, TiePolicy::Merge);
}

template <typename Statistic>
BootstrapDistribution run_bootstrap(const Sample& s, const BootstrapOptions& opt, Statistic&& stat)
{
  check_options(opt);
  if (s.empty()) throw std::invalid_argument("bootstrap needs a non-empty sample");
  BootstrapDistribution out;
  out.n = s.size();
  std::vector<std::uint32_t> ones(s.size(), 1);
  out.point = stat(s, std::span<const std::uint32_t>(ones));
  out.replicates.resize(opt.draws);
  for (std::size_t b = 0; b < opt.draws; ++b) {
    Stream stream(opt.seed, {opt.replicate, static_cast<std::uint64_t>(b)});
    const auto counts = resample_counts(s.size(), stream);
    out.replicates[b] = stat(s, std::span<const std::uint32_t>(counts));
  }
  return out;
}

}  // namespace detail

// Interval from a bootstrap distribution. Centered:
//   G_b = sqrt(n) (stat_b - point),
//   CI  = [point - q_{1-a/2}(G) / sqrt(n), point - q_{a/2}(G) / sqrt(n)],
// with type-7 quantiles; std_error = sd(G) / sqrt(n).
inline ProfitEstimate bootstrap_interval(const BootstrapDistribution& d,
                                         double level,
                                         CiMethod method,
                                         std::uint64_t seed)
{
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  const double root_n = std::sqrt(static_cast<double>(d.n));
  std::vector<double> g(d.replicates.size());
  for (std::size_t b = 0; b < g.size(); ++b) g[b] = root_n * (d.replicates[b] - d.point);
  std::sort(g.begin(), g.end());
  const double alpha = 1.0 - level;

  ProfitEstimate e;
  e.point = d.point;
  e.level = level;
  e.b_draws = d.replicates.size();
  e.seed = seed;
  e.std_error = numeric::sample_sd(g) / root_n;
  const double q_lo = numeric::quantile_type7(g, alpha / 2.0);
  const double q_hi = numeric::quantile_type7(g, 1.0 - alpha / 2.0);
  if (method == CiMethod::Centered) {
    e.method = EstimateMethod::CenteredBootstrap;
    e.ci_low = d.point - q_hi / root_n;
    e.ci_high = d.point - q_lo / root_n;
  } else {
    e.method = EstimateMethod::PercentileBootstrap;
    e.ci_low = d.point + q_lo / root_n;
    e.ci_high = d.point + q_hi / root_n;
  }
  return e;
}

// Plug-in estimate of Var(p(theta) - c(x(theta))) under the empirical law.
inline double plugin_variance(const Menu& m, const Sample& s, const Environment& env)
{
  if (s.empty()) throw std::invalid_argument("plugin_variance needs a non-empty sample");
  std::vector<double> w(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) w[i] = per_consumer_profit(m, s[i], env);
  const double mean = numeric::mean(w);
  double ss = 0.0;
  for (double x : w) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(w.size());
}

// Normal interval from the plug-in variance.
inline ProfitEstimate plugin_ci_profit(const Menu& m, const Sample& s, const Environment& env, double level)
{
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  ProfitEstimate e;
  e.point = expected_profit(m, ecdf(s), env);
  e.std_error = std::sqrt(plugin_variance(m, s, env) / static_cast<double>(s.size()));
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + level / 2.0);
  e.ci_low = e.point - z * e.std_error;
  e.ci_high = e.point + z * e.std_error;
  e.level = level;
  e.method = EstimateMethod::PluginNormal;
  return e;
}

inline BootstrapDistribution bootstrap_profit_distribution(const Menu& m,
                                                           const Sample& s,
                                                           const Environment& env,
                                                           const BootstrapOptions& opt)
{
  m.check_against(env);
  if (opt.estimator == Estimator::Ecdf) {
    std::vector<double> w(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) w[i] = per_consumer_profit(m, s[i], env);
    const auto n = static_cast<double>(s.size());
    auto d = detail::run_bootstrap(s, opt, [&](const Sample&, std::span<const std::uint32_t> counts) {
      double total = 0.0;
      for (std::size_t i = 0; i < counts.size(); ++i) total += counts[i] * w[i];
      return total / n;
    });
    d.point = expected_profit(m, ecdf(s), env);
    return d;
  }
  return detail::run_bootstrap(s, opt, [&](const Sample& base, std::span<const std::uint32_t> counts) {
    return expected_profit(m, detail::estimate_cdf(detail::expand(base, counts), opt, env), env);
  });
}

inline BootstrapDistribution bootstrap_optimal_distribution(const Sample& s,
                                                            const Environment& env,
                                                            const BootstrapOptions& opt)
{
  return detail::run_bootstrap(s, opt, [&](const Sample& base, std::span<const std::uint32_t> counts) {
    return optimal_profit(detail::estimate_cdf(detail::expand(base, counts), opt, env), env, opt.solver)
      .optimal_value;
  });
}

inline BootstrapDistribution bootstrap_regret_distribution(const Menu& m,
                                                           const Sample& s,
                                                           const Environment& env,
                                                           const BootstrapOptions& opt)
{
  m.check_against(env);
  return detail::run_bootstrap(s, opt, [&](const Sample& base, std::span<const std::uint32_t> counts) {
    const auto F = detail::estimate_cdf(detail::expand(base, counts), opt, env);
    return optimal_profit(F, env, opt.solver).optimal_value - expected_profit(m, F, env);
  });
}

// Interval for pi(M, F0) from n-out-of-n resampling of the sample.
inline ProfitEstimate bootstrap_ci_profit(const Menu& m,
                                          const Sample& s,
                                          const Environment& env,
                                          const BootstrapOptions& opt)
{
  return bootstrap_interval(bootstrap_profit_distribution(m, s, env, opt), opt.level, opt.ci, opt.seed);
}

// Interval for Pi(F0), built on the empirically optimal menu of each resample.
inline ProfitEstimate bootstrap_ci_optimal_profit(const Sample& s, const Environment& env, const BootstrapOptions& opt)
{
  return bootstrap_interval(bootstrap_optimal_distribution(s, env, opt), opt.level, opt.ci, opt.seed);
}

// Interval for the regret Pi(F0) - pi(M, F0); both terms use the same resamples.
inline ProfitEstimate bootstrap_ci_regret(const Menu& m,
                                          const Sample& s,
                                          const Environment& env,
                                          const BootstrapOptions& opt)
{
  return bootstrap_interval(bootstrap_regret_distribution(m, s, env, opt), opt.level, opt.ci, opt.seed);
}

// Interval for pi(A, F0) - pi(B, F0) on shared resamples.
inline ComparisonResult bootstrap_compare(const Menu& a,
                                          const Menu& b,
                                          const Sample& s,
                                          const Environment& env,
                                          const BootstrapOptions& opt)
{
  a.check_against(env);
  b.check_against(env);
  std::vector<double> w(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    w[i] = per_consumer_profit(a, s[i], env) - per_consumer_profit(b, s[i], env);
  }
  const auto n = static_cast<double>(s.size());
  BootstrapDistribution d;
  if (opt.estimator == Estimator::Ecdf) {
    d = detail::run_bootstrap(s, opt, [&](const Sample&, std::span<const std::uint32_t> counts) {
      double total = 0.0;
      for (std::size_t i = 0; i < counts.size(); ++i) total += counts[i] * w[i];
      return total / n;
    });
    d.point = expected_profit(a, ecdf(s), env) - expected_profit(b, ecdf(s), env);
  } else {
    d = detail::run_bootstrap(s, opt, [&](const Sample& base, std::span<const std::uint32_t> counts) {
      const auto F = detail::estimate_cdf(detail::expand(base, counts), opt, env);
      return expected_profit(a, F, env) - expected_profit(b, F, env);
    });
  }
  const auto e = bootstrap_interval(d, opt.level, opt.ci, opt.seed);
  return {e.point, e.ci_low, e.ci_high, e.level, !(e.ci_low <= 0.0 && 0.0 <= e.ci_high)};
}

}  // namespace eom
