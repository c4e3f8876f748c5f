#pragma once

#include <stdexcept>
#include <string>

namespace nkpa {

/// Failure category. Maps one-to-one onto the C API status codes and the
/// CLI exit-code contract.
enum class ErrorKind {
    Validation,  ///< malformed or physically invalid input
    Solver,      ///< root solve, fixed point or fit did not succeed
    Io,          ///< file system failure
    Dependency,  ///< a prerequisite result (e.g. calibration) is missing
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class SolverError : public Error {
public:
    explicit SolverError(const std::string& what) : Error(ErrorKind::Solver, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class DependencyError : public Error {
public:
    explicit DependencyError(const std::string& what) : Error(ErrorKind::Dependency, what) {}
};

}  // namespace nkpa
