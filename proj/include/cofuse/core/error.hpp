#pragma once

#include <stdexcept>
#include <string>

namespace cofuse {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller violated an operation's precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid scenario or run configuration. Reported before any simulation work.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed serialized input. `field()` names the offending field path.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what),
          field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Unrecoverable numerical failure during a run (non-finite weights, degenerate densities).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Broken internal invariant; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace cofuse
