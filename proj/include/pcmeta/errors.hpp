#pragma once

#include <stdexcept>
#include <string>

namespace pcmeta {

// Bad arguments: malformed input, out-of-range parameters, arguments outside
// a function's mathematical domain.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public InputError {
 public:
  using InputError::InputError;
};

// Subset enumeration would exceed the configured budget.
class BudgetExceeded : public InputError {
 public:
  using InputError::InputError;
};

// A numeric limit did not settle (e.g. component extraction on a
// non-sensitive rule).
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pcmeta
