#pragma once

#include <stdexcept>
#include <string>

namespace qcarpet {

// Argument outside the mathematical domain of an operation (mode index < 1,
// position outside the box, vanishing normalisation, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid user-supplied configuration. Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Adaptive quadrature failed to reach the requested absolute tolerance.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achieved, double requested)
      : std::runtime_error(what), achieved_(achieved), requested_(requested) {}

  double achieved() const noexcept { return achieved_; }
  double requested() const noexcept { return requested_; }

 private:
  double achieved_;
  double requested_;
};

// Least-squares envelope fit had too few usable points.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the CLI for unsupported operations on a given shape variant.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace qcarpet
