#pragma once

#include <stdexcept>
#include <string>

namespace magraph {

// Malformed input: bad JSON, schema violations, unreadable files.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally invalid graphs or argument values.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: broken Hermitian invariant, eigensolver non-convergence,
// identically-zero witness polynomials.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// A configurable work budget was exceeded before the computation finished.
struct BudgetError : NumericError {
  explicit BudgetError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace magraph
