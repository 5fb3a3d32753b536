// errors.hpp: exception types raised by the geophase library.
//
// Two families: DomainError for inputs outside an operation's domain
// (caller mistakes, bad configuration) and NumericalError for computations
// that ran but could not produce a trustworthy answer.

#pragma once

#include <stdexcept>
#include <string>

namespace geophase {

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Polar angle at 0 or pi where the adapted frame's csc(theta0) diverges.
class PoleSingularity : public DomainError {
public:
    using DomainError::DomainError;
};

// Azimuth not strictly increasing, or sampled too coarsely to unwrap.
class ParametrizationError : public DomainError {
public:
    using DomainError::DomainError;
};

class DegenerateField : public DomainError {
public:
    using DomainError::DomainError;
};

class DimensionMismatch : public DomainError {
public:
    using DomainError::DomainError;
};

// <A> vanishes in the reference state, so no precession axis exists.
class DegenerateDrivingField : public DomainError {
public:
    using DomainError::DomainError;
};

class InsufficientResolution : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// No eigenvector overlaps the reference state by more than 1/sqrt(2).
class TrackingAmbiguity : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IntegratorFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class AdiabaticityBroken : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace geophase
