#pragma once

#include <stdexcept>
#include <string>

namespace ks2d {

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  explicit ShapeMismatch(const std::string& what)
      : Error("shape mismatch: " + what) {}
};

/// Spectral symbol of the step operator has an entry with |k| <= threshold.
class NearSingular : public Error {
 public:
  NearSingular(const std::string& what, double min_abs_symbol)
      : Error(what), min_abs_symbol_(min_abs_symbol) {}
  double min_abs_symbol() const { return min_abs_symbol_; }

 private:
  double min_abs_symbol_;
};

/// Dense LU met a pivot below tolerance.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

class SizeLimit : public Error {
 public:
  using Error::Error;
};

/// A step produced a non-finite entry.
class NonFinite : public Error {
 public:
  using Error::Error;
};

}  // namespace ks2d
