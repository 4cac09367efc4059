#pragma once

#include <stdexcept>
#include <string>

namespace pide {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller broke a structural precondition (mismatched grids, missing history).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Breakdown inside a numerical kernel, e.g. a zero pivot.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The fixed-point iteration hit its cap before the increment dropped below eps.
class NonconvergenceError : public std::runtime_error {
 public:
  NonconvergenceError(int step, int iterations, double last_increment)
      : std::runtime_error("fixed-point iteration did not converge at step " +
                           std::to_string(step) + " after " +
                           std::to_string(iterations) +
                           " iterations (last increment " +
                           std::to_string(last_increment) + ")"),
        step_(step),
        iterations_(iterations),
        last_increment_(last_increment) {}

  int step() const noexcept { return step_; }
  int iterations() const noexcept { return iterations_; }
  double last_increment() const noexcept { return last_increment_; }

 private:
  int step_;
  int iterations_;
  double last_increment_;
};

/// A computed level violated the a-priori energy bound.
class StabilityViolation : public std::runtime_error {
 public:
  StabilityViolation(int step, double norm, double bound)
      : std::runtime_error("stability bound violated at step " +
                           std::to_string(step) + ": ||U|| = " +
                           std::to_string(norm) + " > " +
                           std::to_string(bound)),
        step_(step) {}

  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace pide
