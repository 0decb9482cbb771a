#pragma once

#include <stdexcept>
#include <string>

namespace lrdecon {

/// Bad arguments or malformed data handed to a library entry point.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A wavelet level whose frequency band does not fit the sampling grid.
class LevelOverflow : public InvalidInput {
 public:
  LevelOverflow(const std::string& what, int max_usable_J)
      : InvalidInput(what), max_usable_J_(max_usable_J) {}
  int max_usable_J() const noexcept { return max_usable_J_; }

 private:
  int max_usable_J_;
};

/// A Fourier series that should describe a real signal is not Hermitian.
class SymmetryViolation : public InvalidInput {
 public:
  SymmetryViolation(const std::string& what, double max_asymmetry)
      : InvalidInput(what), max_asymmetry_(max_asymmetry) {}
  double max_asymmetry() const noexcept { return max_asymmetry_; }

 private:
  double max_asymmetry_;
};

/// Circulant embedding of an autocovariance is not nonnegative definite.
class SynthesisFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Statistical estimation could not produce a value (e.g. degenerate input).
class EstimationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Level selection left no wavelet level to estimate.
class InfeasibleConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lrdecon
