#pragma once

#include <stdexcept>
#include <string>

namespace shs {

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Solver or integrator failure; `value` carries the last residual, step size
// or condition estimate depending on the thrower.
struct NumericalError : std::runtime_error {
  NumericalError(const std::string& what, double value = 0.0)
      : std::runtime_error(what), value(value) {}
  double value;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace shs
