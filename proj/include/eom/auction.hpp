#pragma once

#include "eom/distributions.hpp"
#include "eom/errors.hpp"
#include "eom/guarantees.hpp"
#include "eom/numeric.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eom {

enum class AuctionMode
{
  SecondOrderSurvival,  // 1 - F2(r)
  StandardRevenue       // second-price auction with reserve r, net of seller value
};

inline const char* to_string(AuctionMode m)
{
  return m == AuctionMode::SecondOrderSurvival ? "literal" : "standard";
}

inline AuctionMode parse_auction_mode(const std::string& s)
{
  if (s == "literal") return AuctionMode::SecondOrderSurvival;
  if (s == "standard") return AuctionMode::StandardRevenue;
  throw std::invalid_argument("unknown auction mode '" + s + "' (expected literal or standard)");
}

// CDF of the second-highest of M i.i.d. draws as a function of u = F(theta):
//   h(u) = M u^{M-1} (1 - u) + u^M.
inline double second_order_transform(double u, int M)
{
  if (M < 2) throw std::invalid_argument("second-order statistic needs M >= 2");
  const double um1 = std::pow(u, M - 1);
  return std::clamp(M * um1 * (1.0 - u) + um1 * u, 0.0, 1.0);
}

inline double second_order_cdf(const Cdf& F, int M, double theta, Side side = Side::Right)
{
  return second_order_transform(F(theta, side), M);
}

// sup_t |F2(t) - G2(t)| with both one-sided limits at every knot.
inline double second_order_sup_distance(const Cdf& F, const Cdf& G, int M)
{
  double best = 0.0;
  for (double t : detail::comparison_points(F, G)) {
    for (const auto side : {Side::Right, Side::LeftLimit}) {
      best = std::max(best, std::fabs(second_order_cdf(F, M, t, side) - second_order_cdf(G, M, t, side)));
    }
  }
  return best;
}

// Single-item auction to M bidders with i.i.d. continuous types.
//
// The tail integral int_r^{theta_max} F2 is tabulated once. Piecewise-linear
// laws (including Uniform) are integrated exactly segment by segment; other
// laws use adaptive Gauss-Kronrod on a fixed partition of the support.
class AuctionSetting
{
public:
  AuctionSetting(Cdf F, int bidders, double seller_value = 0.0)
    : F_(std::move(F))
    , M_(bidders)
    , c_(seller_value)
  {
    if (M_ < 2) throw std::invalid_argument("an auction needs at least 2 bidders");
    if (!(c_ >= 0.0) || !std::isfinite(c_)) throw std::invalid_argument("seller value must be >= 0");
    if (F_.as<dist::EmpiricalStep>()) {
      throw DomainError("auction settings need a continuous CDF; interpolate the empirical CDF first");
    }
    if (!F_.jumps().empty()) throw DomainError("auction settings need a CDF without atoms");
    build_table();
  }

  const Cdf& cdf() const noexcept { return F_; }
  int bidders() const noexcept { return M_; }
  double seller_value() const noexcept { return c_; }
  Interval support() const { return F_.support(); }

  double second_order(double theta) const { return second_order_transform(F_(theta), M_); }

  // int_r^{theta_max} F2(t) dt.
  double tail_integral(double r) const
  {
    const double lo = edges_.front(), hi = edges_.back();
    if (r >= hi) return 0.0;
    if (r < lo) return tail_.front() + (lo - r) * second_order(r);
    const auto k =
      static_cast<std::size_t>(std::upper_bound(edges_.begin(), edges_.end(), r) - edges_.begin()) - 1;
    return cell_integral(k, r, edges_[k + 1]) + tail_[k + 1];
  }

  // int_r^{theta_max} t dF2(t) = theta_max - r F2(r) - int_r^{theta_max} F2.
  double tail_mean(double r) const
  {
    const double hi = edges_.back();
    if (r >= hi) return 0.0;
    return hi - r * second_order(r) - tail_integral(r);
  }

private:
  struct Segment
  {
    double x0, x1, y0, y1;
  };

  // Antiderivative of h(u) in u.
  double h_antiderivative(double u) const
  {
    const double M = M_;
    return std::pow(u, M_) - (M - 1.0) / (M + 1.0) * std::pow(u, M_ + 1);
  }

  double linear_piece_integral(double x0, double x1, double y0, double y1) const
  {
    if (x1 <= x0) return 0.0;
    if (y1 == y0) return (x1 - x0) * second_order_transform(y0, M_);
    return (x1 - x0) * (h_antiderivative(y1) - h_antiderivative(y0)) / (y1 - y0);
  }

  double cell_integral(std::size_t k, double a, double b) const
  {
    if (b <= a) return 0.0;
    if (piecewise_) {
      const auto& s = segments_[k];
      const double slope = (s.y1 - s.y0) / (s.x1 - s.x0);
      return linear_piece_integral(a, b, s.y0 + slope * (a - s.x0), s.y0 + slope * (b - s.x0));
    }
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double t) { return second_order(t); }, a, b, 3, 1e-11);
  }

  void build_table()
  {
    std::vector<double> xs, ys;
    if (const auto* u = F_.as<dist::Uniform>()) {
      xs = {u->a, u->b};
      ys = {0.0, 1.0};
    } else if (const auto* p = F_.as<dist::PiecewiseLinear>()) {
      xs = p->x;
      ys = p->y;
    }
    if (!xs.empty()) {
      piecewise_ = true;
      edges_ = xs;
      for (std::size_t k = 0; k + 1 < xs.size(); ++k) segments_.push_back({xs[k], xs[k + 1], ys[k], ys[k + 1]});
    } else {
      const auto s = F_.support();
      edges_ = numeric::linspace(s.lower, s.upper, kCells + 1);
    }
    tail_.assign(edges_.size(), 0.0);
    for (std::size_t k = edges_.size() - 1; k-- > 0;) {
      tail_[k] = tail_[k + 1] + cell_integral(k, edges_[k], edges_[k + 1]);
    }
  }

  static constexpr std::size_t kCells = 256;

  Cdf F_;
  int M_;
  double c_;
  bool piecewise_ = false;
  std::vector<Segment> segments_;
  std::vector<double> edges_;
  std::vector<double> tail_;  // tail_[k] = int_{edges_[k]}^{theta_max} F2
};

// Expected profit of a second-price auction with reserve r.
//   SecondOrderSurvival: 1 - F2(r)
//   StandardRevenue:     r M F(r)^{M-1} (1 - F(r)) + int_r t dF2(t) - c (1 - F(r)^M)
inline double auction_profit(double r, const AuctionSetting& s, AuctionMode mode = AuctionMode::StandardRevenue)
{
  if (mode == AuctionMode::SecondOrderSurvival) return 1.0 - s.second_order(r);
  const double u = s.cdf()(r);
  const int M = s.bidders();
  const double um1 = std::pow(u, M - 1);
  return r * M * um1 * (1.0 - u) + s.tail_mean(r) - s.seller_value() * (1.0 - um1 * u);
}

struct ReserveResult
{
  double reserve = 0.0;
  double value = 0.0;
};

// Grid of `grid` points over the support, then golden-section refinement
// around the best few grid points. The smallest maximizer wins ties.
inline ReserveResult optimal_reserve(const AuctionSetting& s,
                                     AuctionMode mode = AuctionMode::StandardRevenue,
                                     std::size_t grid = 10000,
                                     std::size_t refine_candidates = 5)
{
  const auto support = s.support();
  const auto pts = numeric::linspace(support.lower, support.upper, std::max<std::size_t>(grid, 2));
  const auto objective = [&](double r) { return auction_profit(r, s, mode); };
  std::vector<double> values(pts.size());
  ReserveResult best{support.lower, -std::numeric_limits<double>::infinity()};
  const auto consider = [&](double r, double v) {
    if (v > best.value || (v == best.value && r < best.reserve)) best = {r, v};
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    values[i] = objective(pts[i]);
    consider(pts[i], values[i]);
  }
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  const auto top = std::min(refine_candidates, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                    [&](std::size_t a, std::size_t b) { return values[a] > values[b] || (values[a] == values[b] && a < b); });
  for (std::size_t k = 0; k < top; ++k) {
    const std::size_t i = order[k];
    const double lo = pts[i == 0 ? 0 : i - 1];
    const double hi = pts[std::min(i + 1, pts.size() - 1)];
    const auto refined = numeric::golden_section_max(objective, lo, hi, 1e-12);
    consider(refined.argmax, refined.value);
  }
  return best;
}

inline double auction_lipschitz_constant(int M)
{
  if (M < 2) throw std::invalid_argument("an auction needs at least 2 bidders");
  return 2.0 * M * (M - 1);
}

// Profit and regret guarantees for the empirically optimal reserve, L = 2M(M-1).
inline std::pair<GuaranteeResult, GuaranteeResult> auction_regret_guarantee(const BoundKind& kind,
                                                                           std::uint64_t n,
                                                                           double delta,
                                                                           int M)
{
  return regret_guarantee(kind, n, delta, auction_lipschitz_constant(M));
}

}  // namespace eom
