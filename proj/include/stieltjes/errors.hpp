#pragma once

#include <stdexcept>
#include <string>

namespace stieltjes {

/// Argument outside the interval a derivator (or other object) is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The g-derivative is not defined at the requested point (F_g \ D_g or the
/// closure of C_g).
class UndefinedPointError : public DomainError {
 public:
  UndefinedPointError(const std::string& what, double at)
      : DomainError(what), at_(at) {}
  double at() const noexcept { return at_; }

 private:
  double at_;
};

/// Adaptive quadrature hit its refinement cap before meeting tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error)
      : std::runtime_error(what), estimate_(estimate), error_(error) {}
  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

/// A limit process (difference quotients, extrapolation) did not settle.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_estimate)
      : std::runtime_error(what), last_estimate_(last_estimate) {}
  double last_estimate() const noexcept { return last_estimate_; }

 private:
  double last_estimate_;
};

/// Jump factor 1 + c(t)*delta(t) is zero, so ln|factor| does not exist.
class DegenerateCoefficientError : public DomainError {
 public:
  using DomainError::DomainError;
};

class HorizonSelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The right-hand side returned a non-finite value or the wrong dimension.
class RhsEvaluationError : public std::runtime_error {
 public:
  RhsEvaluationError(const std::string& what, double at) : std::runtime_error(what), at_(at) {}
  double at() const noexcept { return at_; }

 private:
  double at_;
};

}  // namespace stieltjes
