#pragma once

#include <stdexcept>

namespace saa {

// Runtime numerical failure (solver blow-up, oracle violation, NaN
// contamination). Argument/contract violations use std::invalid_argument.
// The CLI maps std::invalid_argument to exit code 2 and numerical_error to 3.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace saa
