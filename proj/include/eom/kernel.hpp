#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eom {

enum class KernelShape
{
  Uniform,
  Triangle,
  Epanechnikov
};

// Compact-support smoothing kernel on [-1, 1] with its moments
// k1 = int |u| K(u) du and k2 = int K(u)^2 du.
struct KernelSpec
{
  KernelShape shape = KernelShape::Epanechnikov;
  double k1 = 3.0 / 8.0;
  double k2 = 3.0 / 5.0;
  double support_radius = 1.0;

  static KernelSpec of(KernelShape shape)
  {
    switch (shape) {
      case KernelShape::Uniform: return {shape, 0.5, 0.5, 1.0};
      case KernelShape::Triangle: return {shape, 1.0 / 3.0, 2.0 / 3.0, 1.0};
      case KernelShape::Epanechnikov: return {shape, 3.0 / 8.0, 3.0 / 5.0, 1.0};
    }
    throw std::invalid_argument("unknown kernel shape");
  }

  double density(double u) const noexcept
  {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    switch (shape) {
      case KernelShape::Uniform: return 0.5;
      case KernelShape::Triangle: return 1.0 - (u < 0.0 ? -u : u);
      case KernelShape::Epanechnikov: return 0.75 * (1.0 - u * u);
    }
    return 0.0;
  }

  // Integrated kernel, int_{-1}^{u} K.
  double cdf(double u) const noexcept
  {
    if (u <= -1.0) return 0.0;
    if (u >= 1.0) return 1.0;
    switch (shape) {
      case KernelShape::Uniform: return 0.5 * (u + 1.0);
      case KernelShape::Triangle:
        return u <= 0.0 ? 0.5 * (1.0 + u) * (1.0 + u) : 1.0 - 0.5 * (1.0 - u) * (1.0 - u);
      case KernelShape::Epanechnikov: return 0.25 * (2.0 + 3.0 * u - u * u * u);
    }
    return 0.0;
  }
};

inline const char* to_string(KernelShape shape)
{
  switch (shape) {
    case KernelShape::Uniform: return "uniform";
    case KernelShape::Triangle: return "triangle";
    case KernelShape::Epanechnikov: return "epanechnikov";
  }
  return "?";
}

inline KernelShape parse_kernel_shape(std::string_view name)
{
  if (name == "uniform") return KernelShape::Uniform;
  if (name == "triangle") return KernelShape::Triangle;
  if (name == "epanechnikov") return KernelShape::Epanechnikov;
  throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

}  // namespace eom
