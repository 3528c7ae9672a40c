#pragma once

#include <stdexcept>

namespace pdnet {

/// Raised when an input violates a documented precondition (bad sizes,
/// invalid graph, malformed configuration, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot produce a meaningful answer, e.g. a
/// singular system or a recursion without a steady state.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pdnet
