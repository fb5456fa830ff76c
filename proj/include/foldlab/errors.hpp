#pragma once

#include <stdexcept>
#include <string>

namespace foldlab {

// Rejected model parameters, descriptors, grids or config fields.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// No invertible (n-1)x(n-1) block of the mixed Hessian at a point.
class DegenerateCoordinatesError : public std::runtime_error {
 public:
  explicit DegenerateCoordinatesError(const std::string& what) : std::runtime_error(what) {}
};

// Every iterated kernel derivative up to j_max vanished within tolerance.
class UnclassifiedSingularityError : public std::runtime_error {
 public:
  explicit UnclassifiedSingularityError(const std::string& what) : std::runtime_error(what) {}
};

// Vector length does not match the grid node count.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace foldlab
