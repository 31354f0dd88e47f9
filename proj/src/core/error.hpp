#pragma once

#include <stdexcept>
#include <string>

namespace socketlab {

/// Raised when caller-supplied data violates a precondition or cannot be parsed.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input. `line()` is 1-based; 0 when no line applies.
class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t line)
        : InputError(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Inputs were valid but the computation cannot produce a result
/// (singular matrix, non-convergence, physical bound exceeded).
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace socketlab
