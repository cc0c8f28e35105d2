#pragma once

#include <stdexcept>
#include <string>

namespace fracnoether {

/// A violated precondition or malformed input. Maps to CLI exit code 1.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation that could not produce a trustworthy result (non-convergence,
/// non-finite values, blow-up). Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fracnoether
