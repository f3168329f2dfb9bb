#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace tdl {

/// Base of every error raised by the library. `category()` is a short
/// machine-parsable tag ("range", "accuracy", ...) that the CLI prints.
class Error : public std::runtime_error
{
public:
    Error(std::string category, const std::string& message);

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

class UnsupportedOperation : public Error
{
public:
    explicit UnsupportedOperation(const std::string& message) : Error("unsupported", message) {}
};

class CalibrationError : public Error
{
public:
    explicit CalibrationError(const std::string& message) : Error("calibration", message) {}
};

/// Quadrature did not reach the requested tolerance.
class AccuracyError : public Error
{
public:
    AccuracyError(const std::string& message, std::complex<double> estimate, double error_bound);

    std::complex<double> estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    std::complex<double> estimate_;
    double error_bound_;
};

class RangeError : public Error
{
public:
    explicit RangeError(const std::string& message) : Error("range", message) {}
};

/// Singular, indefinite or rank-deficient matrix.
class ConditioningError : public Error
{
public:
    ConditioningError(const std::string& message, double min_eigenvalue);

    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

class DomainError : public Error
{
public:
    explicit DomainError(const std::string& message) : Error("domain", message) {}
};

class ContractViolation : public Error
{
public:
    explicit ContractViolation(const std::string& message) : Error("contract", message) {}
};

class UsageError : public Error
{
public:
    explicit UsageError(const std::string& message) : Error("usage", message) {}
};

class IoError : public Error
{
public:
    explicit IoError(const std::string& message) : Error("io", message) {}
};

} // namespace tdl
