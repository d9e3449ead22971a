#pragma once

#include <stdexcept>
#include <string>

namespace romega {

// Rejection of mathematically invalid input (non-hyperbolic map, exhausted
// enumeration budget, ...). CLI maps this to exit code 1.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed invocation or config. CLI maps this to exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace romega
