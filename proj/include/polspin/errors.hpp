#pragma once

#include <stdexcept>
#include <string>

namespace polspin {

// Bad user input: malformed files, out-of-range parameters, inconsistent
// dimensions.  The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative routine failed to reach its tolerance.  CLI exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polspin
