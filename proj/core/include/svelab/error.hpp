#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace svelab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A step of a time-marching solver could not be completed.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::size_t node)
      : std::runtime_error(what + " (node " + std::to_string(node) + ")"), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// Problem description is inconsistent with the requested scheme or operation.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace svelab
