#pragma once

#include "eom/auction.hpp"
#include "eom/distributions.hpp"
#include "eom/environment.hpp"
#include "eom/experiments.hpp"
#include "eom/guarantees.hpp"
#include "eom/inference.hpp"
#include "eom/mechanisms.hpp"
#include "eom/solvers.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eom::io {

using nlohmann::json;

// Input that cannot be read or parsed.
class InputError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

// Whole-string numeric parse; throws InputError on trailing garbage.
inline double parse_number(std::string_view text)
{
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
    throw InputError("not a number: '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) throw InputError("not a finite number: '" + std::string(text) + "'");
  return value;
}

// ---------------------------------------------------------------- samples

// One value per line. Blank lines are skipped; with `header` the first
// non-blank line is skipped too. A line may hold extra comma-separated
// columns, of which only the first is read.
inline Sample parse_sample(std::istream& in, bool header = false, const std::string& origin = "sample")
{
  std::vector<double> values;
  std::string line;
  bool skipped = !header;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (!skipped) {
      skipped = true;
      continue;
    }
    const auto field = split(t, ',').front();
    try {
      values.push_back(parse_number(field));
    } catch (const InputError& e) {
      throw InputError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (values.empty()) throw InputError(origin + ": no values");
  try {
    return Sample(std::move(values));
  } catch (const std::invalid_argument& e) {
    throw InputError(origin + ": " + e.what());
  }
}

inline Sample read_sample(const std::string& path, bool header = false)
{
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sample file '" + path + "'");
  return parse_sample(in, header, path);
}

inline std::string format17(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_sample(std::ostream& out, const Sample& s, bool header = false)
{
  if (header) out << "theta\n";
  for (double x : s.values()) out << format17(x) << '\n';
}

// ------------------------------------------------------------ distributions

// "uniform:a:b", "beta:alpha:beta[:lower:upper]", "point:x", and
// "mixture[w1*spec1+w2*spec2+...]" with non-mixture components.
inline Cdf parse_distribution(std::string_view spec)
{
  spec = trim(spec);
  const std::string text(spec);
  try {
    if (spec.starts_with("mixture[") && spec.ends_with("]")) {
      const auto body = spec.substr(8, spec.size() - 9);
      std::vector<double> weights;
      std::vector<Cdf> components;
      for (const auto part : split(body, '+')) {
        const auto star = part.find('*');
        if (star == std::string_view::npos) throw InputError("mixture component needs weight*spec");
        weights.push_back(parse_number(part.substr(0, star)));
        const auto inner = trim(part.substr(star + 1));
        if (inner.starts_with("mixture")) throw InputError("nested mixtures are not supported");
        components.push_back(parse_distribution(inner));
      }
      return Cdf::mixture(std::move(weights), std::move(components));
    }
    const auto parts = split(spec, ':');
    const auto family = trim(parts.front());
    std::vector<double> args;
    for (std::size_t i = 1; i < parts.size(); ++i) args.push_back(parse_number(parts[i]));
    if (family == "uniform" && args.size() == 2) return Cdf::uniform(args[0], args[1]);
    if (family == "beta" && args.size() == 2) return Cdf::beta(args[0], args[1]);
    if (family == "beta" && args.size() == 4) return Cdf::beta(args[0], args[1], args[2], args[3]);
    if (family == "point" && args.size() == 1) return Cdf::point_mass(args[0]);
  } catch (const std::invalid_argument& e) {
    throw InputError("distribution '" + text + "': " + e.what());
  } catch (const InputError& e) {
    throw InputError("distribution '" + text + "': " + e.what());
  }
  throw InputError("unrecognized distribution '" + text +
                   "' (expected uniform:a:b, beta:a:b[:lo:hi], point:x or mixture[w*spec+...])");
}

// ------------------------------------------------------------ environments

struct EnvironmentSpec
{
  std::string kind = "linear";  // linear | separable
  double theta_min = 0.0;
  double theta_max = 1.0;
  double x_max = 1.0;
  double c_bar = 0.0;                 // linear kind
  std::string benefit = "power:0.5";  // separable kind: power:a (x^a) or linear
  std::string cost = "quadratic:1";   // separable kind: linear:c (c x) or quadratic:k (k x^2 / 2)
};

inline std::function<double(double)> parse_benefit(const std::string& spec)
{
  const auto parts = split(spec, ':');
  if (parts.size() == 1 && parts[0] == "linear") return [](double x) { return x; };
  if (parts.size() == 2 && parts[0] == "power") {
    const double a = parse_number(parts[1]);
    if (!(a > 0.0)) throw InputError("benefit exponent must be > 0");
    return [a](double x) { return std::pow(x, a); };
  }
  throw InputError("unrecognized benefit '" + spec + "' (expected linear or power:a)");
}

inline Environment::Cost parse_cost(const std::string& spec)
{
  const auto parts = split(spec, ':');
  if (parts.size() == 2 && parts[0] == "linear") {
    const double c = parse_number(parts[1]);
    return [c](double x) { return c * x; };
  }
  if (parts.size() == 2 && parts[0] == "quadratic") {
    const double k = parse_number(parts[1]);
    return [k](double x) { return 0.5 * k * x * x; };
  }
  throw InputError("unrecognized cost '" + spec + "' (expected linear:c or quadratic:k)");
}

inline Environment make_environment(const EnvironmentSpec& spec)
{
  try {
    const TypeSpace types(spec.theta_min, spec.theta_max);
    if (spec.kind == "linear") return Environment::linear_unit_demand(types, spec.c_bar, spec.x_max);
    if (spec.kind == "separable") {
      return Environment::separable(types, spec.x_max, parse_benefit(spec.benefit), parse_cost(spec.cost));
    }
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("environment: ") + e.what());
  }
  throw InputError("unrecognized environment kind '" + spec.kind + "' (expected linear or separable)");
}

inline EnvironmentSpec environment_spec_from_json(const json& j)
{
  EnvironmentSpec spec;
  try {
    spec.kind = j.value("kind", spec.kind);
    spec.theta_min = j.value("theta_min", spec.theta_min);
    spec.theta_max = j.value("theta_max", spec.theta_max);
    spec.x_max = j.value("x_max", spec.x_max);
    spec.c_bar = j.value("c_bar", spec.c_bar);
    spec.benefit = j.value("benefit", spec.benefit);
    spec.cost = j.value("cost", spec.cost);
  } catch (const json::exception& e) {
    throw InputError(std::string("environment config: ") + e.what());
  }
  return spec;
}

// ------------------------------------------------------------------- menus

inline json to_json(const Menu& m)
{
  json items = json::array();
  for (const auto& it : m.items()) items.push_back({{"x", it.quantity}, {"p", it.price}});
  return {{"items", items}};
}

inline Menu menu_from_json(const json& j)
{
  try {
    std::vector<MenuItem> items;
    for (const auto& it : j.at("items")) items.push_back({it.at("x").get<double>(), it.at("p").get<double>()});
    return Menu(std::move(items));
  } catch (const json::exception& e) {
    throw InputError(std::string("menu: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("menu: ") + e.what());
  }
}

inline json read_json_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline Menu read_menu(const std::string& path)
{
  return menu_from_json(read_json_file(path));
}

// ----------------------------------------------------------------- results

inline json to_json(const SolveResult& r)
{
  json j = to_json(r.menu);
  j["optimal_value"] = r.optimal_value;
  j["method"] = to_string(r.method);
  j["grid_size"] = r.diagnostics.grid_size;
  j["refinement_iterations"] = r.diagnostics.refinement_iterations;
  if (r.price) j["price"] = *r.price;
  return j;
}

inline json to_json(const ProfitEstimate& e)
{
  return {{"point", e.point},
          {"std_error", e.std_error},
          {"ci_low", e.ci_low},
          {"ci_high", e.ci_high},
          {"level", e.level},
          {"method", to_string(e.method)},
          {"b_draws", e.b_draws},
          {"seed", e.seed}};
}

inline json to_json(const ComparisonResult& c)
{
  return {{"diff_point", c.diff_point},
          {"ci_low", c.ci_low},
          {"ci_high", c.ci_high},
          {"level", c.level},
          {"reject_equal", c.reject_equal}};
}

inline json to_json(const GuaranteeResult& g)
{
  return {{"delta", g.delta}, {"bound", g.bound}, {"n", g.n}, {"L", g.L}, {"flavor", to_string(g.flavor)}};
}

// -------------------------------------------------------------- experiments

// Keys: target, distributions, menu, sample_sizes, replications,
// bootstrap_draws, levels, seed, c_bar, theta_min, theta_max, estimator,
// workers. Missing keys keep the McConfig defaults; missing sample_sizes
// follow the target (see default_sample_sizes).
inline McConfig mc_config_from_json(const json& j)
{
  McConfig cfg;
  try {
    if (j.contains("target")) cfg.target = parse_mc_target(j.at("target").get<std::string>());
    cfg.distributions.clear();
    for (const auto& d : j.at("distributions")) cfg.distributions.push_back(parse_distribution(d.get<std::string>()));
    if (j.contains("menu")) cfg.fixed_menu = menu_from_json(j.at("menu"));
    cfg.sample_sizes = j.contains("sample_sizes") ? j.at("sample_sizes").get<std::vector<std::size_t>>()
                                                   : default_sample_sizes(cfg.target);
    cfg.replications = j.value("replications", cfg.replications);
    cfg.bootstrap_draws = j.value("bootstrap_draws", cfg.bootstrap_draws);
    if (j.contains("levels")) cfg.levels = j.at("levels").get<std::vector<double>>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.c_bar = j.value("c_bar", cfg.c_bar);
    cfg.type_lower = j.value("theta_min", cfg.type_lower);
    cfg.type_upper = j.value("theta_max", cfg.type_upper);
    if (j.contains("estimator")) {
      const auto e = j.at("estimator").get<std::string>();
      if (e == "ecdf") {
        cfg.estimator = Estimator::Ecdf;
      } else if (e == "interp") {
        cfg.estimator = Estimator::InterpEcdf;
      } else {
        throw InputError("estimator must be ecdf or interp");
      }
    }
    cfg.workers = j.value("workers", cfg.workers);
  } catch (const json::exception& e) {
    throw InputError(std::string("experiment config: ") + e.what());
  }
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("experiment config: ") + e.what());
  }
  return cfg;
}

}  // namespace eom::io
