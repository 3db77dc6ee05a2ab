#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace poro {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, meshes, or loads.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed input text (mesh files, configs). Carries the 1-based line.
class ParseError : public Error {
public:
    ParseError(const std::string& source, int line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

/// Raised when a system has a known kernel that nothing removes.
class SingularSystemError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Picard non-convergence; keeps the increment history for the caller.
class ConvergenceError : public SolverError {
public:
    ConvergenceError(const std::string& what, std::vector<double> increments)
        : SolverError(what), increments_(std::move(increments)) {}
    const std::vector<double>& increments() const { return increments_; }

private:
    std::vector<double> increments_;
};

}  // namespace poro
