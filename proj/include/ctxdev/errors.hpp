#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ctxdev {

/// Base of every error raised by the library. `code()` is a stable
/// snake_case identifier that the HTTP layer forwards to clients.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// A required column or attribute is missing from the input.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& message) : Error("schema_error", message) {}
};

/// Malformed input. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& message, std::size_t line = 0)
        : Error("parse_error", line ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IntegrityError : public Error {
public:
    explicit IntegrityError(const std::string& message) : Error("integrity_error", message) {}
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& message) : Error("parameter_error", message) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config_error", message) {}
};

class EmptyInputError : public Error {
public:
    explicit EmptyInputError(const std::string& message) : Error("empty_input", message) {}
};

class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& message) : Error("degenerate_input", message) {}
};

class OutOfSpanError : public Error {
public:
    explicit OutOfSpanError(const std::string& message) : Error("out_of_span", message) {}
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& message) : Error("not_found", message) {}
};

} // namespace ctxdev
