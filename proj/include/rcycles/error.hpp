#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rcycles {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of an operation (x not in X, bad alphabet letter, p not a probability vector).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A map or system that fails the Markov conditions.
class MarkovError : public Error {
 public:
  using Error::Error;
};

// Solver non-convergence, non-finite functionals, broken internal consistency.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Enumeration larger than the configured word budget.
class SizeGuardError : public Error {
 public:
  using Error::Error;
};

// Malformed experiment configuration. `field` is a JSON-pointer-like path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace rcycles
