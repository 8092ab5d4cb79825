#pragma once

// Monotonicity thresholds, minimising Hurst indices and crossing times of the
// EWIFG variance V(H, k, t).

#include <functional>
#include <string_view>
#include <utility>

#include "ewifg/quad.hpp"

namespace ewifg::analysis {

constexpr double kDefaultRootTol = 1e-8;

/// Root of f on [lo, hi] by a bracketing Brent-family solver (TOMS 748).
/// Requires f(lo)·f(hi) ≤ 0; returns the midpoint of a final bracket no wider
/// than tol. Throws NoSignChange or MaxIterations.
double brent_root(const std::function<double(double)>& f, double lo, double hi,
                  double tol = kDefaultRootTol, int max_iterations = 200);

/// Scans lo, lo + step, ... up to hi for the first sign change of f and
/// returns that bracket. Throws NoSignChange if none is found.
std::pair<double, double> scan_bracket(const std::function<double(double)>& f, double lo,
                                       double hi, double step);

struct ThresholdReport {
  double tau1 = 0.0;
  double tau_half = 0.0;
  double log3 = 0.0;
  double log_2_plus_sqrt3 = 0.0;
  double rate_k = 1.0;
  double residual_tau1 = 0.0;      ///< |∂V(1, τ₁)/∂H|
  double residual_tau_half = 0.0;  ///< |∂V(½, τ½)/∂H|
  std::pair<double, double> bracket_tau1{};
  std::pair<double, double> bracket_tau_half{};

  /// 1 < τ₁ < log 3 < τ½.
  [[nodiscard]] bool ordered() const;
};

/// Time τ₁ at which ∂V(1, t)/∂H changes sign (negative before, positive
/// after). The bracket [1, log 3] is tried first; if it does not straddle a
/// root the search scans t = 0.25, 0.5, ... up to 10.
double find_tau1(double rate = 1.0, double tol = kDefaultRootTol,
                 const quad::QuadConfig& cfg = {});

/// Same for ∂V(½, t)/∂H, with initial bracket [log 3, 2].
double find_tau_half(double rate = 1.0, double tol = kDefaultRootTol,
                     const quad::QuadConfig& cfg = {});

ThresholdReport thresholds(double rate = 1.0, double tol = kDefaultRootTol,
                           const quad::QuadConfig& cfg = {});

enum class Regime {
  DecreasingEverywhere,  ///< ∂V/∂H ≤ 0 on [0, 1]; minimum at H = 1
  InteriorMinHighH,      ///< unique minimiser in (½, 1)
  InteriorMinLowH,       ///< unique minimiser in (0, ½]
  IncreasingOnHalfOne,   ///< ∂V/∂H ≥ 0 from H = 0 on; minimum at H = 0
};

std::string_view to_string(Regime regime);

struct MinimumResult {
  double time = 0.0;
  double h_star = 0.0;
  double v_min = 0.0;
  double derivative_residual = 0.0;  ///< |∂V/∂H| at h_star for interior regimes
  Regime regime = Regime::DecreasingEverywhere;
};

/// Minimiser of H ↦ V(H, k, t) over [0, 1]. Since ∂²V/∂H² > 0 the derivative
/// changes sign at most once; the regime follows from its signs at
/// H ∈ {0, ½, 1} and interior minima are located by root-finding on ∂V/∂H.
MinimumResult find_min_h(double t, double rate = 1.0, double tol = kDefaultRootTol,
                         const quad::QuadConfig& cfg = {});

struct Crossing {
  double time = 0.0;
  double common_variance = 0.0;
};

/// V(½, k, t) = V(1, k, t) at t = log((k+2)/(2−k))/k with common value
/// 4/(2−k)². Defined for 0 < |k| < 2.
Crossing crossing_time_half_one(double rate);

/// V(0, k, t) = V(½, k, t) at t = log((1+k)/(1−k))/(2k) with common value
/// 1/(1−k). Defined for 0 < |k| < 1.
Crossing crossing_time_zero_half(double rate);

struct ZeroOneCrossing {
  double analytic = 0.0;  ///< log(2 + √3)
  double numeric = 0.0;   ///< root of V(0, t) − V(1, t)
};

/// Crossing of V(0, t) and V(1, t) for k = 1.
ZeroOneCrossing crossing_time_zero_one(double tol = kDefaultRootTol);

/// Positive root in t of V(h_a, k, t) − V(h_b, k, t), located by scanning
/// t ∈ (0, t_max] and then refined by brent_root.
double numeric_crossing_time(double h_a, double h_b, double rate, double tol = 1e-12,
                             double t_max = 20.0, const quad::QuadConfig& cfg = {});

}  // namespace ewifg::analysis
