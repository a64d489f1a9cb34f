#pragma once

#include <stdexcept>
#include <string>

namespace transflow {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (p outside [0,1], x outside a support).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Measure parameters violate an invariant (negative density, mass != 1, bad support).
class InvalidMeasureError : public Error {
public:
    using Error::Error;
};

/// Map is not strictly increasing / differentiable where required.
class InvalidMapError : public Error {
public:
    using Error::Error;
};

class SeedCompatibilityError : public Error {
public:
    using Error::Error;
};

class SeedSignError : public Error {
public:
    using Error::Error;
};

/// Orbit requested from a fixed point.
class DegenerateOrbitError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// 1/v not integrable on the seed interval.
class NormalizationError : public Error {
public:
    using Error::Error;
};

/// No admissible shift found by the approximate-controllability scan.
class SearchFailureError : public Error {
public:
    using Error::Error;
};

/// Measure pair outside the supported analytic ray classes.
class UnsupportedClassError : public Error {
public:
    using Error::Error;
};

class ConstructionError : public Error {
public:
    using Error::Error;
};

/// Malformed JSON input; the message names the offending field.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace transflow
