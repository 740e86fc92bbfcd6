#pragma once

#include <stdexcept>
#include <string>

namespace polypdet {

/// Broad failure classes. The CLI maps these onto its exit codes.
enum class ErrorKind {
    Input,     // unreadable or malformed input data
    Config,    // invalid parameters or configuration
    Internal,  // violated internal contract
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Mismatched frame or matrix dimensions.
struct DimensionError : Error {
    explicit DimensionError(const std::string& w) : Error(ErrorKind::Input, "dimension error: " + w) {}
};

// A parameter violates its documented range.
struct ParameterError : Error {
    explicit ParameterError(const std::string& w) : Error(ErrorKind::Config, "parameter error: " + w) {}
};

// Image decode or file read failure.
struct InputError : Error {
    explicit InputError(const std::string& w) : Error(ErrorKind::Input, "input error: " + w) {}
};

// Malformed text input; carries the offending line number when known.
struct ParseError : Error {
    ParseError(const std::string& w, long line)
        : Error(ErrorKind::Input, "parse error at line " + std::to_string(line) + ": " + w), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& w) : Error(ErrorKind::Input, "validation error: " + w) {}
};

// A metric is undefined for the given data (e.g. single-class dataset).
struct MetricError : Error {
    explicit MetricError(const std::string& w) : Error(ErrorKind::Input, "metric error: " + w) {}
};

// Requested specificity cannot be reached by any threshold.
struct CalibrationError : Error {
    explicit CalibrationError(const std::string& w) : Error(ErrorKind::Config, "calibration error: " + w) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorKind::Config, "domain error: " + w) {}
};

// Invalid phantom specification.
struct SpecError : Error {
    explicit SpecError(const std::string& w) : Error(ErrorKind::Config, "phantom spec error: " + w) {}
};

struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorKind::Input, "I/O error: " + w) {}
};

// Degenerate geometric input (empty pixel set, zero eigenvalue where one is required).
struct ContractViolation : Error {
    explicit ContractViolation(const std::string& w) : Error(ErrorKind::Internal, "contract violation: " + w) {}
};

}  // namespace polypdet
