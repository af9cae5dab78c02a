#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nlpot {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document; names the offending key.
class ParseError : public Error {
public:
    ParseError(std::string key, const std::string& what)
        : Error("parse error at key '" + key + "': " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// A value violates a type invariant (decreasing mass, negative density, ...).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the domain of the operation (p outside (1,n), ball outside box, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: non-convergence, divergence, infinite potential.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Inner solver did not reach its residual tolerance.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, std::vector<double> residuals)
        : NumericalError(what), residuals_(std::move(residuals)) {}
    const std::vector<double>& residual_history() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

/// Fixed-point iterates blew up.
class DivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace nlpot
