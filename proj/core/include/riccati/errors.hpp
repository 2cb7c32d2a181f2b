#pragma once

#include <stdexcept>
#include <string>

namespace riccati {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation requested beyond the horizon T.
class TimeOutOfRange : public Error {
public:
    using Error::Error;
};

/// A coefficient set violates a structural hypothesis (rejected, never repaired).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Envelope clamping impossible (e.g. grid-min of H11 below the margin).
class EnvelopeInfeasible : public Error {
public:
    using Error::Error;
};

/// Adaptive stepper could not satisfy the tolerance at a representable step size.
class StepSizeUnderflow : public Error {
public:
    using Error::Error;
};

/// Closed-form oracle evaluated past its analytic blow-up time.
class DomainError : public Error {
public:
    using Error::Error;
};

/// 1 - k*H33(t) vanished in the algebraic relation for m.
class SingularDenominator : public Error {
public:
    using Error::Error;
};

/// Chain does not terminate in an eigenvalue configuration.
class ChainNotEigen : public Error {
public:
    using Error::Error;
};

/// Defect undefined for this chain termination.
class UndefinedDefect : public Error {
public:
    using Error::Error;
};

/// Root bracket does not bracket a sign change.
class BracketInvalid : public Error {
public:
    using Error::Error;
};

/// Chain termination structure changed between bracket endpoints during refinement.
class StructureChangedInsideBracket : public Error {
public:
    using Error::Error;
};

/// A simulated path left the representable range.
class NonFiniteState : public Error {
public:
    using Error::Error;
};

/// Malformed configuration input.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace riccati
