#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace harmflow {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// A requested index range or window does not fit the data.
class RangeError : public Error {
public:
    using Error::Error;
};

// Settings are individually valid but cannot be combined (e.g. dt does not divide the period).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Analysis window is not an integer number of fundamental periods.
class WindowError : public Error {
public:
    using Error::Error;
};

// Input document failed validation. `path` names the offending field, e.g. "solver.dt_s".
class ValidationError : public Error {
public:
    ValidationError(std::string path, const std::string& message)
        : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// The linear system of a time step could not be solved.
class SolverError : public Error {
public:
    SolverError(std::size_t step, const std::string& message)
        : Error("step " + std::to_string(step) + ": " + message), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace harmflow
