#pragma once

#include <stdexcept>
#include <string>

namespace kerrnet {

/// Violated precondition (basis mismatch, bad site-mode set, malformed input).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A requested space or generator exceeds its configured size limit.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Numerical failure during a computation (solver, integrator).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integrator drift exceeded its per-step bound; retry with a smaller dt.
class StepSizeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Density matrix developed an eigenvalue below the positivity bound.
class PositivityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace kerrnet
