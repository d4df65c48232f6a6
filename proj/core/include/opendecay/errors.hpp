// errors.hpp: Exception types raised across the toolkit

#pragma once

#include <stdexcept>
#include <string>

namespace opendecay {

// Base for every error this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shapes of operands are incompatible, or a dimension constraint is violated
// (including d_f < rank of the decay matrix).
class DimensionError : public Error {
public:
    using Error::Error;
};

class NotHermitianError : public Error {
public:
    using Error::Error;
};

class NotPSDError : public Error {
public:
    using Error::Error;
};

// Custom decay coefficients do not reproduce the decay matrix.
class ConstraintError : public Error {
public:
    using Error::Error;
};

// Sample grid is not uniform where a uniform grid is required.
class GridError : public Error {
public:
    using Error::Error;
};

// Non-finite values, singular linear systems, integrator drift.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Malformed configuration text. Carries the offending field path.
class ParseError : public Error {
public:
    ParseError(std::string field, const std::string& message)
        : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Configuration parsed but describes an invalid physical system or run.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Reading or writing a file failed.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace opendecay
