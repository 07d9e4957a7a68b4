#pragma once

#include <stdexcept>
#include <string>

namespace pbitrc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument: non-finite value, bad dimension, out-of-range parameter.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A numerical routine (eigen-estimate, factorization, scaling) did not succeed.
class NumericError : public Error {
  public:
    using Error::Error;
};

/// Iterative method hit its cap; carries the best estimate it had.
class ConvergenceError : public NumericError {
  public:
    ConvergenceError(const std::string& what, double best_estimate)
        : NumericError(what), best_estimate_(best_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }

  private:
    double best_estimate_;
};

/// Random construction produced an unusable object (e.g. an all-zero matrix).
class ConstructionError : public NumericError {
  public:
    using NumericError::NumericError;
};

/// Configuration rejected during validation. `field` names the offending key path.
class ConfigError : public Error {
  public:
    ConfigError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

} // namespace pbitrc
