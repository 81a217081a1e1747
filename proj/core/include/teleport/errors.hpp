#pragma once

#include <stdexcept>
#include <string>

namespace teleport {

/// A numerical procedure did not reach its tolerance. `achieved()` carries
/// the residual or error estimate it did reach.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Operands whose shapes or layouts do not fit together.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A Gaussian channel cannot be written in the coherent-state mixture form
/// (negative P-function width).
class RepresentationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// No admissible parameter point exists for an optimization objective.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace teleport
