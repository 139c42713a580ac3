#pragma once

#include <stdexcept>
#include <string>

namespace wp {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Operands have incompatible dimensions or moduli.
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// A matrix expected to have determinant +1 or -1 does not.
class NotUnimodularError : public Error {
public:
    using Error::Error;
};

/// A generator file is structurally malformed.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A generator system violates the alphabet convention
/// (identity generator, duplicates, or a mutually inverse pair).
class ConventionViolationError : public Error {
public:
    using Error::Error;
};

/// A word string does not parse.
class ParseError : public Error {
public:
    using Error::Error;
};

/// An operation's mathematical precondition does not hold.
class PreconditionViolationError : public Error {
public:
    using Error::Error;
};

/// A state or work budget was exhausted; retry with a larger cap.
class BudgetExceededError : public Error {
public:
    using Error::Error;
};

} // namespace wp
