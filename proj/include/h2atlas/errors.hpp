#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace h2atlas {

/// Root of every error the toolkit raises. Callers that only need a message
/// can catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input. Carries the 1-based line number of the offending line.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& detail)
        : Error(source + ":" + std::to_string(line) + ": " + detail), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input whose parts disagree (e.g. header says 10 cells, body has 9).
class StructuralError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    GeometryError(std::string feature_id, const std::string& detail)
        : Error("polygon '" + feature_id + "': " + detail), feature_id_(std::move(feature_id)) {}

    const std::string& feature_id() const noexcept { return feature_id_; }

private:
    std::string feature_id_;
};

/// A file that cannot be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Two grids that must share a geometry do not.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// A parameter or configuration value outside its allowed domain.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Physically impossible input data (negative irradiance, ...).
class InputError : public Error {
public:
    using Error::Error;
};

class DataQualityError : public Error {
public:
    using Error::Error;
};

class UndefinedCostError : public Error {
public:
    using Error::Error;
};

/// Violated precondition of an operation (programming error on the caller's side).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// The requested hydrogen target cannot be met. `binding()` names the limit that blocks it.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& detail, std::string binding)
        : Error(detail), binding_(std::move(binding)) {}

    const std::string& binding() const noexcept { return binding_; }

private:
    std::string binding_;
};

} // namespace h2atlas
