#pragma once

#include <stdexcept>
#include <string>

namespace fermigns {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters (grid sizes, exponents, solver controls, config keys).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data violating a precondition (negative densities, grid mismatch).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Linearly dependent orbitals handed to an orthonormalization.
class DegeneracyError : public Error {
 public:
  DegeneracyError(const std::string& what, double smallest_eigenvalue)
      : Error(what), smallest_eigenvalue_(smallest_eigenvalue) {}
  double smallest_eigenvalue() const { return smallest_eigenvalue_; }

 private:
  double smallest_eigenvalue_;
};

/// A functional was evaluated at a state where it is undefined
/// (zero interaction energy, vanishing negative part, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace fermigns
