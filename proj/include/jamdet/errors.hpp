#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jamdet {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates an operation precondition.
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// A configuration (scenario, calibration, CLI invocation) is inconsistent.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A symmetric matrix failed the positive-definiteness test during factorization.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(std::size_t pivot_index, double pivot)
        : Error("matrix is not positive definite (pivot " + std::to_string(pivot_index) +
                " = " + std::to_string(pivot) + ")"),
          pivot_index_(pivot_index),
          pivot_(pivot) {}

    std::size_t pivot_index() const noexcept { return pivot_index_; }
    double pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_index_;
    double pivot_;
};

/// No split of a window yields a usable statistic.
class DegenerateWindowError : public Error {
public:
    using Error::Error;
};

/// Not enough data (samples or windows) to carry out the request.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Malformed input row; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Structurally invalid file (ordering, column layout, sidecar mismatch).
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace jamdet
