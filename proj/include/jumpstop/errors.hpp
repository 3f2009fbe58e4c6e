#pragma once

#include <stdexcept>
#include <string>

namespace jumpstop {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter breaks a structural invariant (sigma <= 0, kappa1 <= kappa0,
// jump support reaching -1, non-finite input, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// An argument lies outside the domain of a function (q <= 0, x <= -1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The model is structurally fine but not admissible for the requested
// operation (e.g. rho <= mu_I when solving for the threshold).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// h <= 0: the discounted profit stream has no finite value.
class DivergentPerpetuityError : public Error {
 public:
  using Error::Error;
};

class NoRootError : public Error {
 public:
  using Error::Error;
};

// Closed forms exist only for deterministic jump sizes.
class UnsupportedAnalyticError : public Error {
 public:
  using Error::Error;
};

class NumericRangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace jumpstop
