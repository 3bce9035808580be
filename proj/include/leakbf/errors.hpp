#pragma once

#include <stdexcept>
#include <string>

namespace leakbf {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed value passed to an operation (zero vector, dimension mismatch, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Matrix is rank deficient where full rank is required.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a special function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Root bracketing failed: target not contained in [f(lo), f(hi)].
class BracketError : public Error {
public:
    using Error::Error;
};

/// Inconsistent or out-of-range configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Problem detected as infeasible or unbounded.
class SolverStatusError : public Error {
public:
    using Error::Error;
};

/// Solver failed to reach the requested tolerances.
class SolverNumericError : public Error {
public:
    using Error::Error;
};

/// A solution that theory guarantees to be rank-one came back with higher rank.
class UnexpectedRankError : public Error {
public:
    using Error::Error;
};

} // namespace leakbf
