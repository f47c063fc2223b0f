#pragma once

#include <stdexcept>
#include <string>

namespace wristview {

// Base for everything this library throws. The CLI maps the three
// categories below onto process exit codes (2 input, 3 numerical,
// 4 infeasible scene).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed files, bad shapes, violated input contracts.
class InputError : public Error {
public:
    using Error::Error;
};

// Parse failure with a position. `where` is "file:line" or "file@offset".
class ParseError : public InputError {
public:
    ParseError(const std::string& where, const std::string& what)
        : InputError(where + ": " + what), where_(where) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

class IoError : public InputError {
public:
    using InputError::InputError;
};

class UnsupportedProperty : public InputError {
public:
    using InputError::InputError;
};

class NegativeIndex : public InputError {
public:
    using InputError::InputError;
};

class ShapeMismatch : public InputError {
public:
    using InputError::InputError;
};

class DimensionMismatch : public InputError {
public:
    using InputError::InputError;
};

class LengthMismatch : public InputError {
public:
    using InputError::InputError;
};

class TooSmall : public InputError {
public:
    using InputError::InputError;
};

// The computation itself could not proceed (degenerate geometry,
// non-finite values, empty working sets).
class NumericalError : public Error {
public:
    using Error::Error;
};

class AllSkipped : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonFinite : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EmptyResult : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateConfiguration : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class GridTooLarge : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoFrontPoints : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Synthetic scene generation could not satisfy its visibility invariants.
class InfeasibleScene : public Error {
public:
    using Error::Error;
};

} // namespace wristview
