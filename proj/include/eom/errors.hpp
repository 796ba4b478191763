#pragma once

#include <stdexcept>
#include <string>

namespace eom {

// Raised when inputs are well-formed but violate a model requirement:
// tied observations for interpolation, an unsupported solver pairing,
// a decreasing allocation, and so on.
class DomainError : public std::runtime_error
{
public:
  explicit DomainError(const std::string& what)
    : std::runtime_error(what)
  {}
};

}  // namespace eom
