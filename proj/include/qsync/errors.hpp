#pragma once

#include <stdexcept>
#include <string>

namespace qsync {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidTruncationError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Coherent-state amplitude lost beyond the Fock cutoff exceeds the tolerance.
class TruncationLeakageError : public Error {
 public:
  TruncationLeakageError(const std::string& what, int required_n_max)
      : Error(what), required_n_max_(required_n_max) {}
  int required_n_max() const noexcept { return required_n_max_; }

 private:
  int required_n_max_;
};

/// kappa_A^2 - kappa_B^2 is (numerically) zero, so the decoupling coupling is undefined.
class SingularCouplingError : public Error {
 public:
  enum class Kind {
    Trivial,     // equal qubit frequencies: any kappa_AB works
    Impossible,  // different qubit frequencies: no kappa_AB works
  };
  SingularCouplingError(const std::string& what, Kind kind) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class InvalidParamsError : public Error {
 public:
  using Error::Error;
};

/// A trace/Hermiticity/positivity invariant failed during propagation or analysis.
class NumericalInvariantError : public Error {
 public:
  using Error::Error;
};

class NonUniformGridError : public Error {
 public:
  using Error::Error;
};

class StiffnessError : public Error {
 public:
  using Error::Error;
};

class WindowTooShortError : public Error {
 public:
  using Error::Error;
};

class EmptyBlockError : public Error {
 public:
  using Error::Error;
};

/// Configuration file could not be parsed or failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qsync
