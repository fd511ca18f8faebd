#pragma once

#include <stdexcept>
#include <string>

namespace warpcheck {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A jet operation was evaluated outside its domain (log of a non-positive
/// value, division by zero, ...). Carries the offending op and value.
class JetDomainError : public Error {
 public:
  JetDomainError(std::string op, double value)
      : Error("jet domain error in '" + op + "' at value " + std::to_string(value)),
        op_(std::move(op)),
        value_(value) {}

  const std::string& op() const noexcept { return op_; }
  double value() const noexcept { return value_; }

 private:
  std::string op_;
  double value_;
};

/// Finite-difference stencil or sample left the declared domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DegenerateMetric : public Error {
 public:
  using Error::Error;
};

/// Spanning vectors of a plane (or frame seeds) are linearly dependent.
class DegeneratePlane : public Error {
 public:
  using Error::Error;
};

class InvalidWarping : public Error {
 public:
  using Error::Error;
};

class ImmersionDegenerate : public Error {
 public:
  using Error::Error;
};

class InvalidNormal : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace warpcheck
