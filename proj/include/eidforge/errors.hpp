#pragma once

#include <stdexcept>
#include <string>

namespace eidforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation met a node kind or shape it does not support.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Numeric evaluation hit a vanishing denominator.
class PoleError : public Error {
 public:
  PoleError(const std::string& subexpression, double at)
      : Error("pole in " + subexpression + " at x = " + std::to_string(at)),
        subexpression_(subexpression) {}
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

/// A symbol was left unbound during numeric evaluation.
class UnboundSymbolError : public Error {
 public:
  explicit UnboundSymbolError(const std::string& name)
      : Error("unbound symbol '" + name + "'"), name_(name) {}
  const std::string& symbol() const noexcept { return name_; }

 private:
  std::string name_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An eigenfunction failed the residual precheck of an EID step.
class InvalidEigenfunctionError : public Error {
 public:
  InvalidEigenfunctionError(double max_residual, int step)
      : Error("eigenfunction residual " + std::to_string(max_residual) +
              (step >= 0 ? " at step " + std::to_string(step) : std::string{})),
        max_residual_(max_residual),
        step_(step) {}
  double max_residual() const noexcept { return max_residual_; }
  int step() const noexcept { return step_; }

 private:
  double max_residual_;
  int step_;
};

/// The first integral vanishes, so the transformation has no inverse.
class DegenerateTransformError : public Error {
 public:
  using Error::Error;
};

/// No pole-free sampling window could be found.
class WindowError : public Error {
 public:
  using Error::Error;
};

}  // namespace eidforge
