#pragma once

#include <stdexcept>
#include <string>

namespace kacm {

/// A point lies outside the state space, or a measure charges a boundary point.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A parameter violates an operation's precondition (t <= 0, alpha == beta, k above cap, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A quadrature, series or bound failed to reach its tolerance.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Inputs are inconsistent with each other (mismatched digests, unknown names).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kacm
