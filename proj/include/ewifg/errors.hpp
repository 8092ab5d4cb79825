#pragma once

#include <stdexcept>
#include <string>

namespace ewifg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of the operation (H ∉ [0,1], t < 0, k = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure exhausted its budget without meeting its tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// An integrand returned NaN or ±inf at a quadrature node.
class NonFiniteEvaluation : public Error {
 public:
  using Error::Error;
};

/// Root bracket whose endpoints do not straddle zero.
class NoSignChange : public Error {
 public:
  using Error::Error;
};

class MaxIterations : public Error {
 public:
  using Error::Error;
};

/// Covariance matrix not numerically positive definite, even after jitter.
class CholeskyFailure : public Error {
 public:
  using Error::Error;
};

/// Path length does not match the grid it is integrated on.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace ewifg
