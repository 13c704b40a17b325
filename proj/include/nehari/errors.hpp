#pragma once

#include <stdexcept>
#include <string>

namespace nehari {

// Base class for all library failures so callers can catch coarsely.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A supplied closed form produced NaN or infinity during validation.
class NonFiniteValue : public Error {
public:
    using Error::Error;
};

// Operation requires a declared period and the forcing has none.
class NotPeriodic : public Error {
public:
    using Error::Error;
};

// Two grid functions passed to a binary operation live on different grids.
class GridMismatch : public Error {
public:
    using Error::Error;
};

// Landesman-Lazer margin is non-positive on the requested side.
class NonPositiveK : public Error {
public:
    using Error::Error;
};

// A minimizer clamped interior nodes on an interval at or above the
// certified spacing floor; the floor was under-estimated.
class NoInteriorSolution : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class EigSolveFailure : public Error {
public:
    using Error::Error;
};

// No tested length passed the certification sweep.
class CertificationFailed : public Error {
public:
    using Error::Error;
};

// Partition ascent pinned against the spacing constraints; the span is too
// small for the requested number of sign changes.
class BoundaryStuck : public Error {
public:
    using Error::Error;
};

// Shooting bracket endpoints do not straddle the target.
class NoBracket : public Error {
public:
    using Error::Error;
};

// A shot trajectory changed sign before reaching the far endpoint.
class SignViolation : public Error {
public:
    using Error::Error;
};

// Config file or CLI parameter problems (exit code 1 territory).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Hypothesis validation failed (exit code 2 territory).
class HypothesisError : public Error {
public:
    using Error::Error;
};

} // namespace nehari
