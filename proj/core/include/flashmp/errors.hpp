#pragma once

#include <stdexcept>
#include <string>

namespace flashmp {

/// Invalid box extents, mismatched shapes, or out-of-range indices.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A partition request that cannot be honored (non-divisible extents, overlap too wide).
class SizingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The Woodbury correction matrix is numerically singular for this configuration.
class DegenerateConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CommunicationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time step whose linear solve did not reach the tolerance, or produced non-finite values.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(int step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  [[nodiscard]] int step() const { return step_; }

 private:
  int step_;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace flashmp
