#pragma once

#include <stdexcept>
#include <string>

namespace mlloglint {

/// Raised when a file cannot be parsed as Python source. Carries the
/// file path and 1-based line so callers can record skip entries.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string path, int line, const std::string& message)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + message),
          path_(std::move(path)), line_(line), message_(message) {}

    const std::string& path() const { return path_; }
    int line() const { return line_; }
    const std::string& message() const { return message_; }

private:
    std::string path_;
    int line_;
    std::string message_;
};

/// Raised for source bytes we refuse to decode (embedded NUL).
class EncodingError : public std::runtime_error {
public:
    explicit EncodingError(const std::string& what) : std::runtime_error(what) {}
};

/// Out-of-range line lookups and similar precondition failures.
class OutOfRange : public std::out_of_range {
public:
    explicit OutOfRange(const std::string& what) : std::out_of_range(what) {}
};

/// Invalid statistical parameters (N < 1, p outside (0,1), ...).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// A stratum's population is smaller than the planned sample size.
class InsufficientPopulation : public std::runtime_error {
public:
    explicit InsufficientPopulation(const std::string& what) : std::runtime_error(what) {}
};

/// Kappa is undefined: chance agreement is exactly 1 but raters disagree.
class DegenerateMarginals : public std::runtime_error {
public:
    explicit DegenerateMarginals(const std::string& what) : std::runtime_error(what) {}
};

class EmptyInput : public std::runtime_error {
public:
    explicit EmptyInput(const std::string& what) : std::runtime_error(what) {}
};

/// Findings reference function ids that the gold label file does not know.
class IdMismatch : public std::runtime_error {
public:
    explicit IdMismatch(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mlloglint
