#pragma once

#include <stdexcept>
#include <string>

namespace dphide {

/// Argument outside the mathematical domain of an operation (negative ratio,
/// zero density, non-finite parameter).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The Gaussian ratio integral diverges: gamma*s~^2 - (gamma-1)*s^2 <= 0.
class InfeasibleDomainError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed user input: empty sample, bad configuration, unparsable file.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two tables could not be compared because their keys differ.
class KeyMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An optimizer or fixed-point iteration stopped before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dphide
