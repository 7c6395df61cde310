#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mapn {

/// Base class of every exception thrown by the mapn core library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structural problem in a graph: unknown names, duplicates, bad tokens.
class ModelError : public Error {
public:
    using Error::Error;
};

class AggregationError : public Error {
public:
    using Error::Error;
};

class UnfoldError : public Error {
public:
    using Error::Error;
};

class EnumerationError : public Error {
public:
    using Error::Error;
};

class ExplorationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class GenerationError : public Error {
public:
    using Error::Error;
};

/// Syntax or reference error in a text document. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace mapn
