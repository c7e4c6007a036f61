#pragma once

#include <stdexcept>
#include <string>

namespace oblique {

/// Base of the numerical failures raised by the library. Invalid inputs are
/// reported with std::invalid_argument instead.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A dense system whose pivot fell below the relative singularity threshold.
class SingularMatrixError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A tridiagonal system met a non-positive pivot during factorization.
class NotPositiveDefiniteError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Two actuators share a center, so the cross-Gram matrix has equal columns.
class SingularConfigurationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The actuator span and the orthogonal complement of the eigenfunction span
/// do not form a direct sum; the oblique projection is undefined.
class DirectSumFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A geometric constraint on the actuator placement is violated.
class ConstraintViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace oblique
