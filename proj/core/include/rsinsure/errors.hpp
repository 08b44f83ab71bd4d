#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rsinsure {

// Validation problems map to exit code 1, solver failures to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept = 0;
};

class ValidationError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 1; }
};

class SolverError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class InvalidGenerator : public ValidationError {
public:
    InvalidGenerator(std::size_t row, const std::string& reason)
        : ValidationError("invalid generator, row " + std::to_string(row) + ": " + reason),
          row_(row), reason_(reason) {}
    std::size_t row() const noexcept { return row_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t row_;
    std::string reason_;
};

class SingularChain : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidParameter : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnknownParameterSet : public ValidationError {
public:
    explicit UnknownParameterSet(const std::string& name)
        : ValidationError("unknown parameter set '" + name + "'") {}
};

class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& key, const std::string& what)
        : ValidationError("config key '" + key + "': " + what), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class ConditionViolated : public ValidationError {
public:
    ConditionViolated(std::size_t regime, double lhs, double rhs, const std::string& which);
    std::size_t regime() const noexcept { return regime_; }
    double lhs() const noexcept { return lhs_; }
    double rhs() const noexcept { return rhs_; }

private:
    std::size_t regime_;
    double lhs_;
    double rhs_;
};

class DivergentExpectation : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConstraintViolated : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class RegimeOrderingViolated : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InactiveInsurance : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DegenerateDenominator : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnboundedTail : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NonpositiveWealth : public SolverError {
public:
    using SolverError::SolverError;
};

class SingularSystem : public SolverError {
public:
    using SolverError::SolverError;
};

class NoConvergence : public SolverError {
public:
    NoConvergence(std::size_t iterations, double residual);
    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

// Quadrature could not reach its tolerance.
class NonConvergent : public SolverError {
public:
    NonConvergent(double error_estimate, double tolerance);
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double error_estimate_;
};

class NoRealRoot : public SolverError {
public:
    using SolverError::SolverError;
};

class RootSelectionAmbiguous : public SolverError {
public:
    RootSelectionAmbiguous(double first, double second);
    double first() const noexcept { return first_; }
    double second() const noexcept { return second_; }

private:
    double first_;
    double second_;
};

}  // namespace rsinsure
