#pragma once

#include <stdexcept>
#include <string>

namespace fairgraph {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration or specification (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Arguments that violate an operation's precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Malformed or unusable input data (exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

// A metric whose conditioning event is empty.
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

// Solver failure that indicates a numerical fault (exit code 4).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace fairgraph
