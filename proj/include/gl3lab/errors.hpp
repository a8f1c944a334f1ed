#pragma once

#include <stdexcept>
#include <string>

namespace gl3lab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument hit a pole of a meromorphic function (Gamma, zeta, G±).
class PoleError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the supported domain (overflow guards, bad ranges).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A quadrature or contour integral did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Coefficient or spectral data does not cover a requested index.
class DataRangeError : public Error {
 public:
  DataRangeError(const std::string& what, double required)
      : Error(what), required_(required) {}
  double required() const { return required_; }

 private:
  double required_;
};

/// Malformed input file.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Data violates a structural relation (Hecke relation, sortedness, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace gl3lab
