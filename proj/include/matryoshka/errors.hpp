#pragma once

#include <stdexcept>
#include <string>

namespace matryoshka {

// Base of everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed configs, out-of-range sites, non-unitary gates.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A numerical contract could not be honored.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Raised when a boundary pair is entangled with the rest of the chain and
// extraction was not forced.
class PairNotPure : public NumericalError {
 public:
  explicit PairNotPure(double purity)
      : NumericalError("boundary pair is not pure (purity = " + std::to_string(purity) + ")"),
        purity_(purity) {}

  double purity() const noexcept { return purity_; }

 private:
  double purity_;
};

}  // namespace matryoshka
