#pragma once

#include "eom/errors.hpp"
#include "eom/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace eom {

enum class BoundFamily
{
  Dkw,                 // empirical CDF
  InterpEcdf,          // linearly interpolated empirical CDF
  KernelDeterministic  // integrated kernel density, bounded-variation density
};

struct BoundKind
{
  BoundFamily family = BoundFamily::Dkw;
  double variation_bound = 1.0;  // B, kernel family only
  KernelSpec kernel{};
  double bandwidth = 0.1;  // h, kernel family only

  static BoundKind dkw() { return {BoundFamily::Dkw}; }
  static BoundKind interp_ecdf() { return {BoundFamily::InterpEcdf}; }
  static BoundKind kernel_deterministic(double B, KernelSpec k, double h)
  {
    if (!(B > 0.0) || !(h > 0.0)) throw std::invalid_argument("kernel bound requires B > 0 and h > 0");
    return {BoundFamily::KernelDeterministic, B, k, h};
  }
};

inline const char* to_string(BoundFamily f)
{
  switch (f) {
    case BoundFamily::Dkw: return "dkw";
    case BoundFamily::InterpEcdf: return "interp";
    case BoundFamily::KernelDeterministic: return "kernel";
  }
  return "?";
}

enum class GuaranteeFlavor
{
  ProfitDeviation,
  Regret,
  Deterministic
};

inline const char* to_string(GuaranteeFlavor f)
{
  switch (f) {
    case GuaranteeFlavor::ProfitDeviation: return "profit_deviation";
    case GuaranteeFlavor::Regret: return "regret";
    case GuaranteeFlavor::Deterministic: return "deterministic";
  }
  return "?";
}

// For probabilistic flavors `bound` is P(event) with the event
// |pi_hat - pi| > delta (profit) or regret > 2 delta (regret). For the
// deterministic flavor it is a radius that holds surely.
struct GuaranteeResult
{
  double delta = 0.0;
  double bound = 0.0;
  std::uint64_t n = 0;
  double L = 0.0;
  GuaranteeFlavor flavor = GuaranteeFlavor::ProfitDeviation;
};

// Tail bound p(n, delta) on P(||F_hat - F0||_inf > delta), capped at 1:
//   Dkw          2 exp(-2 n delta^2)
//   InterpEcdf   2 exp(-2 n (delta - 1/n)^2), needs delta > 1/n
//   Kernel       q(n, h) = (2B + 1) k1 h + sqrt(k2 / (n h)), a sure sup-norm radius
inline double deviation_bound(const BoundKind& kind, std::uint64_t n, double delta)
{
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const auto nd = static_cast<double>(n);
  switch (kind.family) {
    case BoundFamily::Dkw:
      if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
      return std::min(1.0, 2.0 * std::exp(-2.0 * nd * delta * delta));
    case BoundFamily::InterpEcdf: {
      if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
      const double gap = delta - 1.0 / nd;
      if (!(gap > 0.0)) throw DomainError("interpolated-ECDF bound requires delta > 1/n");
      return std::min(1.0, 2.0 * std::exp(-2.0 * nd * gap * gap));
    }
    case BoundFamily::KernelDeterministic: {
      const double h = kind.bandwidth;
      return (2.0 * kind.variation_bound + 1.0) * kind.kernel.k1 * h + std::sqrt(kind.kernel.k2 / (nd * h));
    }
  }
  throw std::invalid_argument("unknown bound family");
}

// How the sure sup-norm radius q of the kernel family turns into profit and
// regret radii. Lipschitz continuity gives profit <= L q and regret <= 2 L q.
// The alternative divides by L instead.
enum class KernelRadiusReading
{
  ScaledByL,
  DividedByL
};

// Profit-deviation and regret guarantees for an empirically optimal mechanism
// whose estimator satisfies `kind`, given Lipschitz constant L.
inline std::pair<GuaranteeResult, GuaranteeResult> regret_guarantee(
  const BoundKind& kind,
  std::uint64_t n,
  double delta,
  double L,
  KernelRadiusReading reading = KernelRadiusReading::ScaledByL)
{
  if (!(L > 0.0)) throw std::invalid_argument("Lipschitz constant must be > 0");
  if (kind.family == BoundFamily::KernelDeterministic) {
    const double q = deviation_bound(kind, n, delta);
    const bool scaled = reading == KernelRadiusReading::ScaledByL;
    GuaranteeResult profit{delta, scaled ? L * q : q / L, n, L, GuaranteeFlavor::Deterministic};
    GuaranteeResult regret{delta, scaled ? 2.0 * L * q : q / (2.0 * L), n, L, GuaranteeFlavor::Deterministic};
    return {profit, regret};
  }
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  const double p = deviation_bound(kind, n, delta / L);
  return {GuaranteeResult{delta, p, n, L, GuaranteeFlavor::ProfitDeviation},
          GuaranteeResult{delta, p, n, L, GuaranteeFlavor::Regret}};
}

// Smallest N with p(N, delta / L) <= alpha.
inline std::uint64_t sample_complexity(const BoundKind& kind, double delta, double alpha, double L)
{
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(delta > 0.0) || !(L > 0.0)) throw std::invalid_argument("delta and L must be > 0");
  const double eps = delta / L;
  switch (kind.family) {
    case BoundFamily::Dkw: {
      auto N = static_cast<std::uint64_t>(std::ceil(std::log(2.0 / alpha) / (2.0 * eps * eps)));
      N = std::max<std::uint64_t>(N, 1);
      // Guard the closed form against rounding at the boundary.
      while (N > 1 && deviation_bound(kind, N - 1, eps) <= alpha) --N;
      while (deviation_bound(kind, N, eps) > alpha) ++N;
      return N;
    }
    case BoundFamily::InterpEcdf: {
      // The bound decreases in N once N > 1/eps.
      auto N = static_cast<std::uint64_t>(std::floor(1.0 / eps)) + 1;
      while (deviation_bound(kind, N, eps) > alpha) ++N;
      return N;
    }
    case BoundFamily::KernelDeterministic:
      throw DomainError("sample complexity is not defined for the kernel bound at fixed bandwidth");
  }
  throw std::invalid_argument("unknown bound family");
}

}  // namespace eom
