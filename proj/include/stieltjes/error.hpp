#pragma once

#include <stdexcept>
#include <string>

namespace stieltjes {

// Invalid user input: malformed derivators, out-of-domain arguments, bad
// target descriptions. Maps to exit code 1 in the command-line tool.
class spec_error : public std::invalid_argument {
 public:
  explicit spec_error(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical procedure could not deliver the requested accuracy:
// quadrature not converged, ODE step underflow, rank-deficient systems.
// Maps to exit code 2 in the command-line tool.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stieltjes
