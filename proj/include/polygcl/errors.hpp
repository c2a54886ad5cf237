#pragma once

#include <stdexcept>
#include <string>

namespace polygcl {

// Malformed input file or schema violation.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch, invalid argument, or a checked-mode numeric violation.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int epoch, double last_finite_loss);

  int epoch() const { return epoch_; }
  double last_finite_loss() const { return last_finite_loss_; }

 private:
  int epoch_;
  double last_finite_loss_;
};

// A non-polynomial op sits on the encrypted path.
class HeIncompatibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polygcl
