#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lazyreg {

// A learning-rate / lambda2 combination that breaks SGD positivity
// (eta * lambda2 must stay below 1 so the shrink factor is positive).
struct InvalidRate : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Cache lookup outside the cached range [base - 1, high_water].
struct OutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Malformed text input; line numbers are 1-based.
struct ParseError : std::runtime_error {
  ParseError(std::size_t line_no, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + msg),
        line(line_no) {}
  std::size_t line;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller broke a precondition (non-finite weight, psi > k, bad sizes, ...).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace lazyreg
