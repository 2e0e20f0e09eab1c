#pragma once

#include <stdexcept>
#include <string>

namespace fracsde {

/// A computation failed for numerical reasons (quadrature breakdown,
/// indefinite covariance, degenerate data).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver failed to converge.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double final_residual)
        : NumericalError(what), final_residual_(final_residual) {}
    double final_residual() const { return final_residual_; }

private:
    double final_residual_;
};

/// An operation was invoked in a Hurst regime where it is undefined.
class RegimeError : public std::domain_error {
public:
    explicit RegimeError(const std::string& what) : std::domain_error(what) {}
};

/// A required evaluator (derivative, etc.) was not provided.
class CapabilityError : public std::runtime_error {
public:
    explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fracsde
