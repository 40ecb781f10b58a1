#pragma once

#include <stdexcept>
#include <string>

namespace efebo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Regularized kernel / covariance matrix is not positive definite.
class FactorizationFailure : public Error {
 public:
  using Error::Error;
};

class GridTooSmall : public Error {
 public:
  using Error::Error;
};

/// The epistemic closed form diverges for zero observation noise.
class NoiseVarZero : public Error {
 public:
  using Error::Error;
};

/// A linearization was requested outside the regime where its beta is defined.
class SignConditionViolated : public Error {
 public:
  using Error::Error;
};

/// The local quadratic model has no isolated stationary point.
class DegenerateQuadratic : public Error {
 public:
  using Error::Error;
};

class DomainViolation : public Error {
 public:
  using Error::Error;
};

class NumericalBlowup : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  using Error::Error;
};

class NonFiniteScore : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoFailure : public Error {
 public:
  IoFailure(const std::string& path, const std::string& what)
      : Error(what + ": " + path), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace efebo
