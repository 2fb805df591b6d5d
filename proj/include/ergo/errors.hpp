#pragma once

#include <stdexcept>
#include <string>

namespace ergo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: type invariant violations, mismatched spaces, bad indices.
class InputError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. s <= 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Iterative numerics failed to converge.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Requested iteration count exceeds the configured budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// A truncation window is too short for the requested construction.
class WindowError : public Error {
public:
    using Error::Error;
};

/// Two independent evaluation routes disagree; indicates an implementation bug.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Operation needs data the report does not carry (probe-only runs).
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// Index past the end of a finite sequence.
class RangeError : public Error {
public:
    using Error::Error;
};

}  // namespace ergo
