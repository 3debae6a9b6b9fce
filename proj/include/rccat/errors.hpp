#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rccat {

/// Invalid or inconsistent configuration (bad constants, missing optional
/// parameters an operation needs).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input data. `line()` is 1-based and 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace rccat
