#pragma once

#include <stdexcept>
#include <string>

namespace fbvp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the closed unit interval (kernel and grid evaluation).
class DomainError : public Error {
public:
    using Error::Error;
};

/// ln of a non-positive value, sqrt of a negative, division by zero, ...
class MathDomainError : public Error {
public:
    MathDomainError(const std::string& what, std::string expression)
        : Error(what + " in `" + expression + "`"), expression_(std::move(expression)) {}

    const std::string& expression() const noexcept { return expression_; }

private:
    std::string expression_;
};

class UnboundVariable : public Error {
public:
    explicit UnboundVariable(const std::string& name)
        : Error("unbound variable '" + name + "'"), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Missing, duplicated or unknown field in a problem config.
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, std::string field)
        : Error(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/// A delayed argument phi_m(t_i) left [0,1].
class DelayRangeError : public Error {
public:
    DelayRangeError(const std::string& what, int delay, std::size_t node)
        : Error(what), delay_(delay), node_(node) {}

    int delay() const noexcept { return delay_; }
    std::size_t node() const noexcept { return node_; }

private:
    int delay_;
    std::size_t node_;
};

/// NaN or Inf produced during the fixed-point iteration.
class NonFiniteError : public Error {
public:
    NonFiniteError(const std::string& what, std::size_t iteration)
        : Error(what), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

class UnknownProblem : public Error {
public:
    using Error::Error;
};

} // namespace fbvp
