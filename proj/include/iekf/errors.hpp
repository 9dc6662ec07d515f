#pragma once

#include <stdexcept>
#include <string>

namespace iekf {

/// Caller broke a documented precondition (dimension mismatch, invalid rotation, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument lies outside the domain where a closed form is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A filter computation produced non-finite values.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Innovation covariance S is too ill-conditioned to factor.
class SingularInnovation : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// Prior covariance L P Lᵀ is too ill-conditioned to invert (information form).
class SingularPrior : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace iekf
