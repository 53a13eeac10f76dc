#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ontoeval {

/// Base of every error the library throws. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed XML or RDF/XML; carries the 1-based position reported by the tokenizer.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(message + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// A syntactically valid construct this reader deliberately does not handle
/// (other OWL serializations, unknown rdf:parseType values).
class UnsupportedConstruct : public Error {
public:
    explicit UnsupportedConstruct(const std::string& construct)
        : Error("unsupported construct: " + construct), construct_(construct) {}

    const std::string& construct() const noexcept { return construct_; }

private:
    std::string construct_;
};

class ModelError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class MergeCycleError : public Error {
public:
    using Error::Error;
};

class PolicyError : public Error {
public:
    using Error::Error;
};

class AnnotationError : public Error {
public:
    using Error::Error;
};

class MetricsError : public Error {
public:
    using Error::Error;
};

class QuotaError : public Error {
public:
    using Error::Error;
};

/// Judgment CSV problems; row is 1-based over data rows, 0 for header/file-level errors.
class ImportError : public Error {
public:
    ImportError(const std::string& message, std::size_t row)
        : Error(row == 0 ? message : "row " + std::to_string(row) + ": " + message), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class StatsError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class BackendError : public Error {
public:
    using Error::Error;
};

} // namespace ontoeval
