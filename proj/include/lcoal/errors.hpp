#pragma once

#include <stdexcept>
#include <string>

namespace lcoal {

// Bad user input: malformed measure strings, out-of-range (n, m, k), ...
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation could not be completed to the requested accuracy
// (quadrature non-convergence, overflow in a naive evaluation path).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A configured cap (table size, exact-mode size) would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lcoal
