#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ellinc {

enum class ErrorKind {
  Input,         // malformed or inconsistent data
  Domain,        // argument outside the subspace an operation is defined on
  Convergence,   // iteration budget exhausted
  Capability,    // combination the library does not support
  Construction,  // object invariants cannot be established
  Oracle,        // reference solver found no (or no unique) answer
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every exception thrown by the library. `code()` is a stable,
/// machine-readable identifier that the CLI copies into its error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& message, std::string code = "input_error")
      : Error(ErrorKind::Input, std::move(code), message) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message, std::string code = "domain_error")
      : Error(ErrorKind::Domain, std::move(code), message) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double residual, std::size_t iterations)
      : Error(ErrorKind::Convergence, "convergence_error", message),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

class CapabilityError : public Error {
 public:
  explicit CapabilityError(const std::string& message)
      : Error(ErrorKind::Capability, "capability_error", message) {}
};

class ConstructionError : public Error {
 public:
  explicit ConstructionError(const std::string& message)
      : Error(ErrorKind::Construction, "construction_error", message) {}
};

class OracleFailure : public Error {
 public:
  explicit OracleFailure(const std::string& message)
      : Error(ErrorKind::Oracle, "oracle_failure", message) {}
};

}  // namespace ellinc
