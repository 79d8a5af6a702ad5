#pragma once

#include <stdexcept>
#include <string>

namespace dunce {

/// Malformed input: bad ids, broken invariants, schema mismatch. CLI exit code 2.
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric guard rejected a configuration (degenerate cubic, tangency,
/// collinear points, root finder failure). CLI exit code 3.
class NumericRejection : public std::runtime_error {
public:
    NumericRejection(std::string guard, const std::string& detail)
        : std::runtime_error(guard + ": " + detail), guard_(std::move(guard)) {}

    const std::string& guard() const noexcept { return guard_; }

private:
    std::string guard_;
};

/// Requested profile is outside what is implemented (e.g. Hodge numbers).
class Unsupported : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dunce
