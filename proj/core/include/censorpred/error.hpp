#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace censorpred {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file or record. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string& what)
        : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          source_(std::move(source)),
          line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

/// API misuse: wrong table kind, mismatched feature names, bad parameters.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Incomplete or inconsistent pipeline configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace censorpred
