#pragma once

#include <functional>
#include <string_view>

namespace ewifg::quad {

using Integrand = std::function<double(double)>;

struct QuadConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;

  /// Throws DomainError unless every field is positive.
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;  ///< estimated absolute error, never negative
  int subdivisions = 1;  ///< intervals (adaptive) or refinement levels (DE rules)
  bool converged = true;

  /// max(abs_tol, rel_tol·|value|) was met.
  [[nodiscard]] double require(std::string_view what) const;
};

/// Globally adaptive Gauss–Kronrod (G7/K15) integration of a smooth f over [a, b].
///
/// Intervals are bisected in order of decreasing error estimate until the total
/// estimate drops below max(abs_tol, rel_tol·|value|). When the budget of
/// max_subdivisions intervals is exhausted the best estimate is returned with
/// converged = false. Throws NonFiniteEvaluation if f produces NaN or ±inf.
QuadResult integrate_adaptive(const Integrand& f, double a, double b,
                              const QuadConfig& cfg = {});

/// Tanh–sinh (double exponential) rule on [a, b], for integrands with
/// algebraic or logarithmic endpoint singularities such as z^{2H}·log z.
/// f is never evaluated at a or b.
QuadResult integrate_endpoint_singular(const Integrand& f, double a, double b,
                                       const QuadConfig& cfg = {});

/// Exp–sinh rule on [a, ∞) for integrands decaying at least exponentially,
/// possibly singular at a. The transformed tails are truncated once terms fall
/// below abs_tol/100.
QuadResult integrate_semiinfinite(const Integrand& f, double a,
                                  const QuadConfig& cfg = {});

}  // namespace ewifg::quad
