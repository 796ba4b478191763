#pragma once

#include "eom/distributions.hpp"
#include "eom/errors.hpp"
#include "eom/kernel.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace eom {

// Right-continuous empirical CDF, jump k/n at a k-fold tie.
inline Cdf ecdf(const Sample& s)
{
  return Cdf::empirical(s);
}

enum class TiePolicy
{
  Reject,  // tied observations are a domain error
  Merge    // interpolate between the distinct jump points of the ECDF
};

// Linear interpolation of the ECDF through (theta_(k), k/n), anchored at
// (theta_lower, 0). Within segment k the value is
//   k/n + (1/n) (theta - theta_(k)) / (theta_(k+1) - theta_(k)),
// which stays within 1/n of the ECDF everywhere.
inline Cdf interp_ecdf(const Sample& s, double theta_lower, TiePolicy ties = TiePolicy::Reject)
{
  if (s.empty()) throw std::invalid_argument("interp_ecdf needs a non-empty sample");
  if (!(theta_lower < s.min())) {
    throw DomainError("interp_ecdf: theta_lower must lie strictly below the smallest observation");
  }
  if (ties == TiePolicy::Reject && s.has_ties()) {
    throw DomainError("interp_ecdf: sample contains tied observations");
  }
  const auto v = s.values();
  const auto n = static_cast<double>(v.size());
  std::vector<double> x{theta_lower}, y{0.0};
  x.reserve(v.size() + 1);
  y.reserve(v.size() + 1);
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k + 1 < v.size() && v[k + 1] == v[k]) continue;
    x.push_back(v[k]);
    y.push_back(static_cast<double>(k + 1) / n);
  }
  y.back() = 1.0;
  return Cdf::piecewise_linear(std::move(x), std::move(y));
}

inline double default_bandwidth(std::size_t n)
{
  return std::pow(static_cast<double>(n), -1.0 / 3.0);
}

// Integrated kernel density estimate, F(theta) = (1/n) sum K_int((theta - theta_i) / h).
inline Cdf kernel_cdf(const Sample& s, const KernelSpec& kernel, double h)
{
  return Cdf::kernel_smoothed(s, kernel, h);
}

}  // namespace eom
