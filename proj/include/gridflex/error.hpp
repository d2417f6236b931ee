#pragma once

#include <stdexcept>
#include <string>

namespace gridflex {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (grid, scenario, plan or config files).
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message)
    : Error(source + ":" + std::to_string(line) + ": " + message)
    , line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A well-formed value that breaks a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

class InvalidProgram : public Error {
public:
    using Error::Error;
};

/// No capacity schedule satisfies the flexibility rules from the given state.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

/// A quantity that is mathematically undefined for the given input
/// (zero served energy, zero datacenter energy, ...).
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

}  // namespace gridflex
