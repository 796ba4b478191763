#pragma once

#include "eom/distributions.hpp"
#include "eom/environment.hpp"
#include "eom/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace eom {

struct MenuItem
{
  double quantity;
  double price;

  friend bool operator==(const MenuItem&, const MenuItem&) = default;
};

// Finite menu of (quantity, price) offers. The outside option (0, 0) is
// always implicitly available and is not stored.
//
// Items are kept sorted by quantity. Of several items with the same quantity
// only the cheapest is kept, and zero-quantity items are dropped; neither
// change affects any consumer's choice.
class Menu
{
public:
  Menu() = default;

  explicit Menu(std::vector<MenuItem> items)
  {
    for (const auto& it : items) {
      if (!std::isfinite(it.quantity) || !std::isfinite(it.price)) {
        throw std::invalid_argument("menu items must be finite");
      }
      if (it.quantity < 0.0 || it.price < 0.0) throw std::invalid_argument("menu items must be nonnegative");
      if (it.quantity > 0.0 && it.price == 0.0) {
        throw std::invalid_argument("menu gives away a positive quantity at price 0");
      }
    }
    std::sort(items.begin(), items.end(), [](const MenuItem& a, const MenuItem& b) {
      return a.quantity < b.quantity || (a.quantity == b.quantity && a.price < b.price);
    });
    for (const auto& it : items) {
      if (it.quantity == 0.0) continue;
      if (!items_.empty() && items_.back().quantity == it.quantity) continue;
      items_.push_back(it);
    }
  }

  std::span<const MenuItem> items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  // Throws if a quantity exceeds the environment's capacity.
  void check_against(const Environment& env) const
  {
    for (const auto& it : items_) {
      if (it.quantity > env.x_max() * (1.0 + 1e-12)) {
        throw std::invalid_argument("menu quantity exceeds x_max");
      }
    }
  }

  friend bool operator==(const Menu&, const Menu&) = default;

private:
  std::vector<MenuItem> items_;
};

struct ChoiceOutcome
{
  double quantity = 0.0;
  double price = 0.0;
  double utility = 0.0;
};

// Utility and profit differences this small are treated as ties.
inline constexpr double kTieTolerance = 1e-12;

namespace detail {

// Extended index: 0 is the outside option, i + 1 is menu item i.
inline MenuItem extended_item(const Menu& m, std::size_t e)
{
  return e == 0 ? MenuItem{0.0, 0.0} : m.items()[e - 1];
}

inline double firm_margin(const Menu& m, std::size_t e, const Environment& env)
{
  if (e == 0) return 0.0;
  const auto it = m.items()[e - 1];
  return it.price - env.cost(it.quantity);
}

// Utility-maximizing extended index within [first, last]. Ties in utility go
// to the firm's larger margin, then to the smaller quantity.
inline std::size_t choose(const Menu& m, double theta, const Environment& env, std::size_t first, std::size_t last)
{
  std::size_t best = first;
  double best_u = env.utility(theta, extended_item(m, first).quantity, extended_item(m, first).price);
  double best_margin = firm_margin(m, first, env);
  for (std::size_t e = first + 1; e <= last; ++e) {
    const auto it = extended_item(m, e);
    const double u = env.utility(theta, it.quantity, it.price);
    if (u > best_u + kTieTolerance) {
      best = e;
      best_u = u;
      best_margin = firm_margin(m, e, env);
    } else if (u >= best_u - kTieTolerance) {
      const double margin = firm_margin(m, e, env);
      if (margin > best_margin + kTieTolerance) {
        best = e;
        best_u = std::max(best_u, u);
        best_margin = margin;
      }
    }
  }
  return best;
}

inline std::size_t choose(const Menu& m, double theta, const Environment& env)
{
  return choose(m, theta, env, 0, m.size());
}

}  // namespace detail

// The consumer's pick, firm-favorable among utility ties. Utility is never
// negative because the outside option is always available.
inline ChoiceOutcome consumer_choice(const Menu& m, double theta, const Environment& env)
{
  const auto e = detail::choose(m, theta, env);
  const auto it = detail::extended_item(m, e);
  return {it.quantity, it.price, env.utility(theta, it.quantity, it.price)};
}

// Firm profit p - c(x) from one consumer of type theta.
inline double per_consumer_profit(const Menu& m, double theta, const Environment& env)
{
  return detail::firm_margin(m, detail::choose(m, theta, env), env);
}

namespace detail {

struct ChoiceRegion
{
  double start;
  double end;
  std::size_t choice;
};

inline void split_regions(const Menu& m,
                          const Environment& env,
                          double a,
                          double b,
                          std::size_t ea,
                          std::size_t eb,
                          std::vector<ChoiceRegion>& out)
{
  // Choice is monotone in type, so equal choices at both ends fix the interval.
  if (ea == eb) {
    if (!out.empty() && out.back().choice == ea) {
      out.back().end = b;
    } else {
      out.push_back({a, b, ea});
    }
    return;
  }
  const double mid = a + 0.5 * (b - a);
  if (b - a <= 1e-13 * std::max(1.0, std::fabs(b)) || mid <= a || mid >= b) {
    if (!out.empty() && out.back().choice == ea) {
      out.back().end = b;
    } else {
      out.push_back({a, b, ea});
    }
    out.push_back({b, b, eb});
    return;
  }
  const auto em = choose(m, mid, env, ea, eb);
  split_regions(m, env, a, mid, ea, em, out);
  split_regions(m, env, mid, b, em, eb, out);
}

// Maximal intervals of [a, b] on which the chosen item is constant.
inline std::vector<ChoiceRegion> choice_regions(const Menu& m, const Environment& env, double a, double b)
{
  std::vector<ChoiceRegion> out;
  const auto ea = choose(m, a, env);
  const auto eb = choose(m, b, env);
  if (eb < ea) throw DomainError("choice is not monotone in type; environment is not supermodular");
  split_regions(m, env, a, b, ea, eb, out);
  return out;
}

}  // namespace detail

// pi(M, F) = int (p(theta) - c(x(theta))) dF(theta).
//
// Empirical F: average over the observations. Otherwise the type line is
// cut into intervals of constant choice (thresholds found by bisection);
// the continuous part of F is integrated region by region and every atom is
// credited with the firm-favorable choice at its own location.
inline double expected_profit(const Menu& m, const Cdf& F, const Environment& env)
{
  m.check_against(env);
  if (m.empty()) return 0.0;

  if (const auto* e = F.as<dist::EmpiricalStep>()) {
    double s = 0.0;
    for (double theta : e->sample.values()) s += per_consumer_profit(m, theta, env);
    return s / static_cast<double>(e->sample.size());
  }

  const auto atoms = F.jumps();
  std::vector<double> cum_mass(atoms.size() + 1, 0.0);
  double atom_total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double mass = F(atoms[i]) - F(atoms[i], Side::LeftLimit);
    cum_mass[i + 1] = cum_mass[i] + mass;
    atom_total += mass * per_consumer_profit(m, atoms[i], env);
  }
  if (F.is_atomic()) return atom_total;

  // Continuous part of F.
  const auto continuous_cdf = [&](double x) {
    const auto k = static_cast<std::size_t>(std::upper_bound(atoms.begin(), atoms.end(), x) - atoms.begin());
    return F(x) - cum_mass[k];
  };

  const auto support = F.support();
  double total = atom_total;
  for (const auto& region : detail::choice_regions(m, env, support.lower, support.upper)) {
    if (region.end <= region.start) continue;
    const double mass = continuous_cdf(region.end) - continuous_cdf(region.start);
    total += mass * detail::firm_margin(m, region.choice, env);
  }
  return total;
}

// Nondecreasing step allocation: quantity 0 below the first breakpoint and
// quantities[k] on [breakpoints[k], breakpoints[k+1]).
class Allocation
{
public:
  Allocation() = default;

  Allocation(std::vector<double> breakpoints, std::vector<double> quantities)
    : breakpoints_(std::move(breakpoints))
    , quantities_(std::move(quantities))
  {
    if (breakpoints_.size() != quantities_.size()) {
      throw std::invalid_argument("allocation needs one quantity per breakpoint");
    }
    for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
      if (!std::isfinite(breakpoints_[k]) || !std::isfinite(quantities_[k]) || quantities_[k] < 0.0) {
        throw std::invalid_argument("allocation entries must be finite and nonnegative");
      }
      if (k > 0 && !(breakpoints_[k] > breakpoints_[k - 1])) {
        throw std::invalid_argument("allocation breakpoints must be strictly increasing");
      }
      if (quantities_[k] < (k > 0 ? quantities_[k - 1] : 0.0)) throw DomainError("allocation is decreasing");
    }
  }

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> quantities() const noexcept { return quantities_; }

  double quantity_at(double theta) const
  {
    const auto k = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), theta) - breakpoints_.begin();
    return k == 0 ? 0.0 : quantities_[static_cast<std::size_t>(k - 1)];
  }

private:
  std::vector<double> breakpoints_;
  std::vector<double> quantities_;
};

// Prices implementing an allocation through the envelope payment rule
//   p(theta) = v(theta, x(theta)) - int_{theta_min}^{theta} v_1(s, x(s)) ds.
// On a step allocation the integral is a sum of v-increments over the steps.
inline Menu menu_from_allocation(const Allocation& a, const Environment& env)
{
  std::vector<MenuItem> items;
  double rent = 0.0;
  double prev_t = env.types().lower();
  double prev_q = 0.0;
  for (std::size_t k = 0; k < a.breakpoints().size(); ++k) {
    const double t = a.breakpoints()[k];
    const double q = a.quantities()[k];
    if (q == prev_q) continue;
    if (q > env.x_max() * (1.0 + 1e-12)) throw std::invalid_argument("allocation exceeds x_max");
    rent += env.valuation(t, prev_q) - env.valuation(prev_t, prev_q);
    items.push_back({q, env.valuation(t, q) - rent});
    prev_t = t;
    prev_q = q;
  }
  return Menu(std::move(items));
}

}  // namespace eom
