#pragma once

#include <stdexcept>
#include <string>

namespace mlbisim {

/// Base of all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text: model source, explicit-state files, partition files, configs.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line = 0, int column = 0)
        : Error(line > 0 ? message + " (line " + std::to_string(line) +
                               (column > 0 ? ", column " + std::to_string(column) : std::string()) + ")"
                         : message),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Well-formed input that violates a semantic rule (range overflow, bad binding, ...).
class ModelError : public Error {
public:
    using Error::Error;
};

/// A configured resource limit was hit.
class ResourceError : public Error {
public:
    enum class Kind { states, time, memory, iterations };

    ResourceError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Wrong arguments or violated preconditions at an API or CLI boundary.
class UsageError : public Error {
public:
    using Error::Error;
};

/// A certification check failed (e.g. a partition that is not a bisimulation).
class VerificationError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace mlbisim
