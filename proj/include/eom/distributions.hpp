#pragma once

#include "eom/errors.hpp"
#include "eom/kernel.hpp"
#include "eom/numeric.hpp"
#include "eom/rng.hpp"
#include "eom/special_functions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace eom {

// Sorted list of observed types. Copies share the underlying storage.
class Sample
{
public:
  Sample() = default;

  explicit Sample(std::vector<double> values)
  {
    if (values.empty()) throw std::invalid_argument("sample must contain at least one value");
    for (double v : values) {
      if (!std::isfinite(v)) throw std::invalid_argument("sample values must be finite");
    }
    if (!std::is_sorted(values.begin(), values.end())) std::sort(values.begin(), values.end());
    values_ = std::make_shared<const std::vector<double>>(std::move(values));
  }

  std::span<const double> values() const noexcept
  {
    return values_ ? std::span<const double>(*values_) : std::span<const double>{};
  }
  std::size_t size() const noexcept { return values_ ? values_->size() : 0; }
  bool empty() const noexcept { return size() == 0; }
  double operator[](std::size_t i) const { return (*values_)[i]; }
  double min() const { return values_->front(); }
  double max() const { return values_->back(); }

  bool has_ties() const
  {
    const auto v = values();
    return std::adjacent_find(v.begin(), v.end()) != v.end();
  }

  bool within(double lower, double upper) const { return empty() || (min() >= lower && max() <= upper); }

private:
  std::shared_ptr<const std::vector<double>> values_;
};

enum class Side
{
  Right,     // F(theta)
  LeftLimit  // F(theta-)
};

struct Interval
{
  double lower;
  double upper;
};

class Cdf;

namespace dist {

struct Uniform
{
  double a, b;
};

// Beta(alpha, beta) rescaled to [lower, upper].
struct Beta
{
  double alpha, beta, lower, upper;
};

struct PointMass
{
  double at;
};

struct Mixture
{
  std::vector<double> weights;
  std::vector<Cdf> components;
};

struct EmpiricalStep
{
  Sample sample;
};

// Continuous piecewise-linear CDF through knots (x_k, y_k); y_0 = 0, y_last = 1.
struct PiecewiseLinear
{
  std::vector<double> x, y;
};

struct KernelSmoothed
{
  Sample sample;
  KernelSpec kernel;
  double h;
};

}  // namespace dist

namespace detail {

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::string format_number(double x)
{
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

inline void sort_unique(std::vector<double>& v)
{
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

// A distribution on types. Construct through the named factories, which
// validate parameters. Immutable and cheap to copy.
class Cdf
{
public:
  using Variant = std::variant<dist::Uniform,
                               dist::Beta,
                               dist::PointMass,
                               dist::Mixture,
                               dist::EmpiricalStep,
                               dist::PiecewiseLinear,
                               dist::KernelSmoothed>;

  static Cdf uniform(double a, double b)
  {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) throw std::invalid_argument("Uniform requires a < b");
    return Cdf(dist::Uniform{a, b});
  }

  static Cdf beta(double alpha, double beta, double lower = 0.0, double upper = 1.0)
  {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("Beta requires alpha, beta > 0");
    if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
      throw std::invalid_argument("Beta requires lower < upper");
    }
    return Cdf(dist::Beta{alpha, beta, lower, upper});
  }

  static Cdf point_mass(double at)
  {
    if (!std::isfinite(at)) throw std::invalid_argument("PointMass location must be finite");
    return Cdf(dist::PointMass{at});
  }

  static Cdf mixture(std::vector<double> weights, std::vector<Cdf> components)
  {
    if (weights.empty() || weights.size() != components.size()) {
      throw std::invalid_argument("Mixture needs one weight per component");
    }
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("Mixture weights must be >= 0");
      total += w;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw std::invalid_argument("Mixture weights must sum to 1");
    return Cdf(dist::Mixture{std::move(weights), std::move(components)});
  }

  static Cdf empirical(Sample sample)
  {
    if (sample.empty()) throw std::invalid_argument("empirical CDF needs a non-empty sample");
    return Cdf(dist::EmpiricalStep{std::move(sample)});
  }

  static Cdf piecewise_linear(std::vector<double> x, std::vector<double> y)
  {
    if (x.size() < 2 || x.size() != y.size()) throw std::invalid_argument("PiecewiseLinear needs >= 2 knots");
    for (std::size_t k = 1; k < x.size(); ++k) {
      if (!(x[k] > x[k - 1])) throw std::invalid_argument("PiecewiseLinear knots must be strictly increasing");
      if (y[k] < y[k - 1]) throw std::invalid_argument("PiecewiseLinear values must be nondecreasing");
    }
    if (y.front() != 0.0 || y.back() != 1.0) throw std::invalid_argument("PiecewiseLinear must run from 0 to 1");
    return Cdf(dist::PiecewiseLinear{std::move(x), std::move(y)});
  }

  static Cdf kernel_smoothed(Sample sample, KernelSpec kernel, double h)
  {
    if (sample.empty()) throw std::invalid_argument("kernel CDF needs a non-empty sample");
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("kernel bandwidth must be positive");
    return Cdf(dist::KernelSmoothed{std::move(sample), kernel, h});
  }

  const Variant& variant() const noexcept { return v_; }

  template <class T>
  const T* as() const noexcept
  {
    return std::get_if<T>(&v_);
  }

  double operator()(double theta, Side side = Side::Right) const
  {
    return std::visit(
      detail::overloaded{
        [&](const dist::Uniform& u) { return std::clamp((theta - u.a) / (u.b - u.a), 0.0, 1.0); },
        [&](const dist::Beta& b) {
          return special::incomplete_beta(b.alpha, b.beta, (theta - b.lower) / (b.upper - b.lower));
        },
        [&](const dist::PointMass& p) {
          return side == Side::Right ? (theta >= p.at ? 1.0 : 0.0) : (theta > p.at ? 1.0 : 0.0);
        },
        [&](const dist::Mixture& m) {
          double s = 0.0;
          for (std::size_t i = 0; i < m.weights.size(); ++i) s += m.weights[i] * m.components[i](theta, side);
          return std::clamp(s, 0.0, 1.0);
        },
        [&](const dist::EmpiricalStep& e) {
          const auto v = e.sample.values();
          const auto it = side == Side::Right ? std::upper_bound(v.begin(), v.end(), theta)
                                              : std::lower_bound(v.begin(), v.end(), theta);
          return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
        },
        [&](const dist::PiecewiseLinear& p) {
          if (theta <= p.x.front()) return 0.0;
          if (theta >= p.x.back()) return 1.0;
          const auto k = static_cast<std::size_t>(std::upper_bound(p.x.begin(), p.x.end(), theta) - p.x.begin());
          const double t = (theta - p.x[k - 1]) / (p.x[k] - p.x[k - 1]);
          return p.y[k - 1] + t * (p.y[k] - p.y[k - 1]);
        },
        [&](const dist::KernelSmoothed& k) { return kernel_cdf_value(k, theta); },
      },
      v_);
  }

  Interval support() const
  {
    return std::visit(
      detail::overloaded{
        [](const dist::Uniform& u) { return Interval{u.a, u.b}; },
        [](const dist::Beta& b) { return Interval{b.lower, b.upper}; },
        [](const dist::PointMass& p) { return Interval{p.at, p.at}; },
        [](const dist::Mixture& m) {
          Interval out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
          for (std::size_t i = 0; i < m.components.size(); ++i) {
            if (m.weights[i] <= 0.0) continue;
            const auto s = m.components[i].support();
            out.lower = std::min(out.lower, s.lower);
            out.upper = std::max(out.upper, s.upper);
          }
          return out;
        },
        [](const dist::EmpiricalStep& e) { return Interval{e.sample.min(), e.sample.max()}; },
        [](const dist::PiecewiseLinear& p) {
          // Leading/trailing flat knots carry no mass.
          std::size_t first = 0;
          while (first + 1 < p.y.size() && p.y[first + 1] == 0.0) ++first;
          std::size_t last = p.y.size() - 1;
          while (last > 0 && p.y[last - 1] == 1.0) --last;
          return Interval{p.x[first], p.x[last]};
        },
        [](const dist::KernelSmoothed& k) {
          const double r = k.h * k.kernel.support_radius;
          return Interval{k.sample.min() - r, k.sample.max() + r};
        },
      },
      v_);
  }

  bool has_density() const
  {
    return std::visit(detail::overloaded{
                        [](const dist::PointMass&) { return false; },
                        [](const dist::EmpiricalStep&) { return false; },
                        [](const dist::Mixture& m) {
                          for (std::size_t i = 0; i < m.components.size(); ++i) {
                            if (m.weights[i] > 0.0 && !m.components[i].has_density()) return false;
                          }
                          return true;
                        },
                        [](const auto&) { return true; },
                      },
                      v_);
  }

  // Purely discrete (every unit of mass sits on an atom).
  bool is_atomic() const
  {
    return std::visit(detail::overloaded{
                        [](const dist::PointMass&) { return true; },
                        [](const dist::EmpiricalStep&) { return true; },
                        [](const dist::Mixture& m) {
                          for (std::size_t i = 0; i < m.components.size(); ++i) {
                            if (m.weights[i] > 0.0 && !m.components[i].is_atomic()) return false;
                          }
                          return true;
                        },
                        [](const auto&) { return false; },
                      },
                      v_);
  }

  // Right-derivative of F. Throws if the distribution has atoms.
  double density(double theta) const
  {
    return std::visit(
      detail::overloaded{
        [&](const dist::Uniform& u) { return theta >= u.a && theta < u.b ? 1.0 / (u.b - u.a) : 0.0; },
        [&](const dist::Beta& b) {
          const double w = b.upper - b.lower;
          return special::beta_density(b.alpha, b.beta, (theta - b.lower) / w) / w;
        },
        [&](const dist::PointMass&) -> double { throw DomainError("point mass has no density"); },
        [&](const dist::Mixture& m) {
          double s = 0.0;
          for (std::size_t i = 0; i < m.weights.size(); ++i) {
            if (m.weights[i] > 0.0) s += m.weights[i] * m.components[i].density(theta);
          }
          return s;
        },
        [&](const dist::EmpiricalStep&) -> double { throw DomainError("empirical step CDF has no density"); },
        [&](const dist::PiecewiseLinear& p) {
          if (theta < p.x.front() || theta >= p.x.back()) return 0.0;
          const auto k = static_cast<std::size_t>(std::upper_bound(p.x.begin(), p.x.end(), theta) - p.x.begin());
          return (p.y[k] - p.y[k - 1]) / (p.x[k] - p.x[k - 1]);
        },
        [&](const dist::KernelSmoothed& k) {
          const auto v = k.sample.values();
          const double r = k.h * k.kernel.support_radius;
          auto it = std::upper_bound(v.begin(), v.end(), theta - r);
          double s = 0.0;
          for (; it != v.end() && *it < theta + r; ++it) s += k.kernel.density((theta - *it) / k.h);
          return s / (static_cast<double>(v.size()) * k.h);
        },
      },
      v_);
  }

  // Locations of atoms, ascending.
  std::vector<double> jumps() const
  {
    std::vector<double> out;
    std::visit(detail::overloaded{
                 [&](const dist::PointMass& p) { out.push_back(p.at); },
                 [&](const dist::EmpiricalStep& e) {
                   const auto v = e.sample.values();
                   out.assign(v.begin(), v.end());
                 },
                 [&](const dist::Mixture& m) {
                   for (std::size_t i = 0; i < m.components.size(); ++i) {
                     if (m.weights[i] <= 0.0) continue;
                     const auto j = m.components[i].jumps();
                     out.insert(out.end(), j.begin(), j.end());
                   }
                 },
                 [](const auto&) {},
               },
               v_);
    detail::sort_unique(out);
    return out;
  }

  // Points where F is non-smooth: atoms, kinks and support ends.
  std::vector<double> knots() const
  {
    std::vector<double> out;
    std::visit(detail::overloaded{
                 [&](const dist::Uniform& u) { out = {u.a, u.b}; },
                 [&](const dist::Beta& b) { out = {b.lower, b.upper}; },
                 [&](const dist::PointMass& p) { out = {p.at}; },
                 [&](const dist::Mixture& m) {
                   for (const auto& c : m.components) {
                     const auto k = c.knots();
                     out.insert(out.end(), k.begin(), k.end());
                   }
                 },
                 [&](const dist::EmpiricalStep& e) {
                   const auto v = e.sample.values();
                   out.assign(v.begin(), v.end());
                 },
                 [&](const dist::PiecewiseLinear& p) { out = p.x; },
                 [&](const dist::KernelSmoothed& k) {
                   const double r = k.h * k.kernel.support_radius;
                   for (double v : k.sample.values()) {
                     out.push_back(v - r);
                     out.push_back(v);
                     out.push_back(v + r);
                   }
                 },
               },
               v_);
    detail::sort_unique(out);
    return out;
  }

  std::string name() const
  {
    using detail::format_number;
    return std::visit(
      detail::overloaded{
        [](const dist::Uniform& u) { return "uniform:" + format_number(u.a) + ":" + format_number(u.b); },
        [](const dist::Beta& b) {
          std::string s = "beta:" + format_number(b.alpha) + ":" + format_number(b.beta);
          if (b.lower != 0.0 || b.upper != 1.0) s += ":" + format_number(b.lower) + ":" + format_number(b.upper);
          return s;
        },
        [](const dist::PointMass& p) { return "point:" + format_number(p.at); },
        [](const dist::Mixture& m) {
          std::string s = "mixture[";
          for (std::size_t i = 0; i < m.weights.size(); ++i) {
            if (i) s += "+";
            s += format_number(m.weights[i]) + "*" + m.components[i].name();
          }
          return s + "]";
        },
        [](const dist::EmpiricalStep& e) { return "ecdf:n=" + std::to_string(e.sample.size()); },
        [](const dist::PiecewiseLinear& p) { return "piecewise:knots=" + std::to_string(p.x.size()); },
        [](const dist::KernelSmoothed& k) {
          return std::string("kernel:") + to_string(k.kernel.shape) + ":h=" + format_number(k.h) +
                 ":n=" + std::to_string(k.sample.size());
        },
      },
      v_);
  }

private:
  explicit Cdf(Variant v)
    : v_(std::move(v))
  {}

  static double kernel_cdf_value(const dist::KernelSmoothed& k, double theta)
  {
    const auto v = k.sample.values();
    const double r = k.h * k.kernel.support_radius;
    // Observations at or below theta - r contribute their full unit of mass.
    auto it = std::upper_bound(v.begin(), v.end(), theta - r);
    double s = static_cast<double>(it - v.begin());
    for (; it != v.end() && *it < theta + r; ++it) s += k.kernel.cdf((theta - *it) / k.h);
    return std::clamp(s / static_cast<double>(v.size()), 0.0, 1.0);
  }

  Variant v_;
};

inline double cdf_eval(const Cdf& F, double theta, Side side = Side::Right)
{
  return F(theta, side);
}

inline constexpr double kQuantileTolerance = 1e-12;

// Generalized inverse inf{theta : F(theta) >= q}.
inline double quantile(const Cdf& F, double q)
{
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  const auto generic = [&F, q]() {
    const auto s = F.support();
    if (F(s.lower) >= q) return s.lower;
    double lo = s.lower, hi = s.upper;
    while (hi - lo > kQuantileTolerance) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      if (F(mid) >= q) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    // An atom inside the final bracket is the exact answer.
    for (double j : F.jumps()) {
      if (j > lo && j <= hi && F(j) >= q) return j;
    }
    return hi;
  };

  return std::visit(
    detail::overloaded{
      [&](const dist::Uniform& u) { return q <= 0.0 ? u.a : u.a + q * (u.b - u.a); },
      [&](const dist::Beta& b) {
        if (q <= 0.0) return b.lower;
        if (q >= 1.0) return b.upper;
        const double x = special::inverse_incomplete_beta(b.alpha, b.beta, q);
        return b.lower + x * (b.upper - b.lower);
      },
      [&](const dist::PointMass& p) { return p.at; },
      [&](const dist::EmpiricalStep& e) {
        const auto v = e.sample.values();
        const auto n = v.size();
        // Smallest k with k/n >= q, computed without trusting q * n rounding.
        auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
        k = std::clamp<std::size_t>(k, 1, n);
        while (k > 1 && static_cast<double>(k - 1) / static_cast<double>(n) >= q) --k;
        while (k < n && static_cast<double>(k) / static_cast<double>(n) < q) ++k;
        return v[k - 1];
      },
      [&](const dist::PiecewiseLinear& p) {
        if (q <= 0.0) return F.support().lower;
        const auto k = static_cast<std::size_t>(std::lower_bound(p.y.begin(), p.y.end(), q) - p.y.begin());
        if (k == 0) return p.x.front();
        const double t = (q - p.y[k - 1]) / (p.y[k] - p.y[k - 1]);
        return std::min(p.x[k], p.x[k - 1] + t * (p.x[k] - p.x[k - 1]));
      },
      [&](const dist::Mixture&) { return generic(); },
      [&](const dist::KernelSmoothed&) { return generic(); },
    },
    F.variant());
}

// n i.i.d. draws by inverse transform from the given stream, sorted.
inline Sample draw_sample(const Cdf& F, std::size_t n, Stream& stream)
{
  if (n == 0) throw std::invalid_argument("sample size must be >= 1");
  std::vector<double> out(n);
  if (const auto* e = F.as<dist::EmpiricalStep>()) {
    for (auto& x : out) x = e->sample[stream.below(e->sample.size())];
  } else {
    for (auto& x : out) x = quantile(F, stream.uniform01());
  }
  return Sample(std::move(out));
}

inline Sample draw_sample(const Cdf& F, std::size_t n, std::uint64_t seed)
{
  Stream stream(seed);
  return draw_sample(F, n, stream);
}

namespace detail {

inline constexpr std::size_t kSupGrid = 10000;

// Union of the non-smooth points of F and G plus an even grid over both supports.
inline std::vector<double> comparison_points(const Cdf& F, const Cdf& G)
{
  auto pts = F.knots();
  const auto g = G.knots();
  pts.insert(pts.end(), g.begin(), g.end());
  const auto sf = F.support(), sg = G.support();
  const double lo = std::min(sf.lower, sg.lower), hi = std::max(sf.upper, sg.upper);
  if (hi > lo) {
    const auto grid = numeric::linspace(lo, hi, kSupGrid);
    pts.insert(pts.end(), grid.begin(), grid.end());
  }
  sort_unique(pts);
  return pts;
}

}  // namespace detail

// sup_t |F(t) - G(t)|, with both one-sided limits taken at every knot.
inline double sup_distance(const Cdf& F, const Cdf& G)
{
  double best = 0.0;
  for (double t : detail::comparison_points(F, G)) {
    best = std::max(best, std::fabs(F(t) - G(t)));
    best = std::max(best, std::fabs(F(t, Side::LeftLimit) - G(t, Side::LeftLimit)));
  }
  return best;
}

}  // namespace eom
