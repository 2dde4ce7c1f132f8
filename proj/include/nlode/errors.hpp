#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlode {

/// Base class for every failure the library reports deliberately.
/// The component tag names the subsystem that raised the error so a
/// front end can prefix messages without parsing them.
class Error : public std::runtime_error {
public:
    Error(std::string component, const std::string& message)
        : std::runtime_error(component + ": " + message),
          component_(std::move(component)) {}

    [[nodiscard]] const std::string& component() const noexcept { return component_; }

private:
    std::string component_;
};

/// Raised by the expression parser. Carries the byte offset of the
/// offending token and the set of tokens that would have been legal.
class ParseError : public Error {
public:
    ParseError(std::size_t position, std::vector<std::string> expected,
               const std::string& message)
        : Error("parse", message + " at offset " + std::to_string(position)),
          position_(position),
          expected_(std::move(expected)) {}

    [[nodiscard]] std::size_t position() const noexcept { return position_; }
    [[nodiscard]] const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::vector<std::string> expected_;
};

/// Evaluation touched a parameter the caller never bound.
class UnboundParameter : public Error {
public:
    explicit UnboundParameter(std::string name)
        : Error("expr", "unbound parameter '" + name + "'"), name_(std::move(name)) {}

    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Numerical evaluation failed: overflow, division by zero, or a
/// branch-point argument. Evaluation never returns a non-finite value
/// silently; it raises this instead.
class EvalError : public Error {
public:
    enum class Kind { Overflow, DivisionByZero, BranchPoint };

    EvalError(Kind kind, std::complex<double> at, const std::string& message)
        : Error("expr", message), kind_(kind), at_(at) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::complex<double> at() const noexcept { return at_; }

private:
    Kind kind_;
    std::complex<double> at_;
};

/// Newton iteration did not reach the requested tolerance. The last
/// iterate is attached so a caller can reseed.
class NoConvergence : public Error {
public:
    NoConvergence(std::complex<double> last_iterate, int iterations)
        : Error("series", "root search did not converge after " +
                              std::to_string(iterations) + " iterations"),
          last_iterate_(last_iterate),
          iterations_(iterations) {}

    [[nodiscard]] std::complex<double> last_iterate() const noexcept { return last_iterate_; }
    [[nodiscard]] int iterations() const noexcept { return iterations_; }

private:
    std::complex<double> last_iterate_;
    int iterations_;
};

/// A precondition on the mathematical domain was violated: evaluation
/// right of a growth bound, negative times, a contour left of a pole.
class DomainError : public Error {
public:
    DomainError(std::string component, const std::string& message)
        : Error(std::move(component), message) {}
};

/// Adaptive quadrature ran out of budget before meeting its tolerance.
class QuadratureFailure : public Error {
public:
    explicit QuadratureFailure(const std::string& message)
        : Error("laplace", message) {}
};

/// Contour moments of the principal-part residual did not vanish, so
/// the computed Laurent data cannot be trusted.
class IllConditioned : public Error {
public:
    IllConditioned(double residual, const std::string& message)
        : Error("residue", message), residual_(residual) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A moment integral was requested at an order the transform's decay
/// cannot support. Carries the refused order and the measured decay rate.
class InsufficientDecay : public Error {
public:
    InsufficientDecay(int order, double decay_rate)
        : Error("ivp", "moment of order " + std::to_string(order) +
                           " is not absolutely convergent at measured decay " +
                           std::to_string(decay_rate)),
          order_(order),
          decay_rate_(decay_rate) {}

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] double decay_rate() const noexcept { return decay_rate_; }

private:
    int order_;
    double decay_rate_;
};

/// The interpolation system is rank deficient: the pole data cannot
/// match the requested initial values.
class GenericityFailure : public Error {
public:
    explicit GenericityFailure(const std::string& message) : Error("ivp", message) {}
};

/// Container sizes disagree with the declared problem shape.
class ShapeMismatch : public Error {
public:
    ShapeMismatch(std::string component, const std::string& message)
        : Error(std::move(component), message) {}
};

/// The remainder series showed sustained growth instead of settling.
class DivergenceDetected : public Error {
public:
    explicit DivergenceDetected(const std::string& message)
        : Error("verify", message) {}
};

/// The requested check needs data this object does not carry, for
/// example a symbolic residual check on a sampled-only solution.
class Unsupported : public Error {
public:
    Unsupported(std::string component, const std::string& message)
        : Error(std::move(component), message) {}
};

/// Configuration file errors. The field path identifies the offending
/// entry, for example "pole[2].order".
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error("config", message + " (field " + field + ")"),
          field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace nlode
