#pragma once

// Second-order characteristics of the exponent-Wiener-integral fractional
// Gaussian (EWIFG) process
//
//     X_t = ∫_0^t e^{k s} dB^H_s,   H ∈ [0, 1], t ≥ 0, k ≠ 0,
//
// where B^H is fractional Brownian motion, extended by continuity of the
// covariance to B^1_t = t·ξ and to the white-noise limit at H = 0.

#include <string_view>

#include "ewifg/quad.hpp"

namespace ewifg {

struct EvalPoint {
  double hurst = 0.5;
  double time = 0.0;
  double rate = 1.0;

  /// Throws DomainError unless 0 ≤ H ≤ 1, t ≥ 0 (both finite) and k ≠ 0.
  void validate() const;
};

enum class VarianceMethod { ClosedFormH0, ClosedFormHHalf, ClosedFormH1, QuadratureGeneral };

struct VarianceValue {
  double value = 0.0;
  VarianceMethod method = VarianceMethod::QuadratureGeneral;
  double abs_err = 0.0;  ///< exactly zero for the closed forms
};

enum class CovarianceMethod { ByPartsAllH, SingularKernelHighH, R0Boundary, H1Boundary };

struct CovarianceValue {
  double value = 0.0;
  CovarianceMethod method = CovarianceMethod::ByPartsAllH;
  double abs_err = 0.0;
};

/// Shannon entropy in nats; -inf when the variance is zero.
struct EntropyValue {
  double value = 0.0;
  [[nodiscard]] bool finite() const;
};

std::string_view to_string(VarianceMethod method);
std::string_view to_string(CovarianceMethod method);

/// Covariance of fBm, including the H = 1 (t·s) and H = 0 (white-noise) limits.
double fbm_covariance(double hurst, double t, double s);

/// V(H, k, t) = E X_t². Closed forms at exactly H ∈ {0, ½, 1}; otherwise
///
///     V = e^{kt} [ t^{2H} + k ∫_0^t sinh(k(t−z)) z^{2H} dz ],
///
/// which for k = 1 is e^t t^{2H} + ½ ∫_0^t (e^{2t−z} − e^z) z^{2H} dz.
/// The H = 0 value jumps from 0 at t = 0 to (e^{2kt}+1)/2 for t > 0.
VarianceValue variance(const EvalPoint& p, const quad::QuadConfig& cfg = {});

/// The quadrature formula above at any 0 < H ≤ 1, bypassing the closed forms.
VarianceValue variance_quadrature(const EvalPoint& p, const quad::QuadConfig& cfg = {});

/// R(t, s) = E X_t X_s. For 0 < H < 1 this is the integration-by-parts form
/// obtained from X_t = e^{kt} B_t − k ∫_0^t e^{ku} B_u du. At H = 1 it is
/// (e^{kt}−1)(e^{ks}−1)/k²; at H = 0 it is the boundary covariance R⁰ (zero on
/// the axes, ½ off the diagonal, (e^{2kt}+1)/2 on it). Symmetric in (t, s)
/// bit for bit.
CovarianceValue covariance(double hurst, double t, double s, double rate = 1.0,
                           const quad::QuadConfig& cfg = {});

/// Kernel form H(2H−1) ∬ e^{k(u+v)} |u−v|^{2H−2} du dv, valid only for
/// ½ < H < 1. Kept as an independent cross-check of covariance().
CovarianceValue covariance_high_h(double hurst, double t, double s, double rate = 1.0,
                                  const quad::QuadConfig& cfg = {});

/// Entropy of N(0, σ²): ½(1 + log 2π) + ½ log σ².
double gaussian_entropy(double variance);

EntropyValue shannon_entropy(const EvalPoint& p, const quad::QuadConfig& cfg = {});

/// ∂V/∂H = e^{kt} [ 2 t^{2H} log t + 2k ∫_0^t sinh(k(t−z)) z^{2H} log z dz ].
/// Defined for H ∈ [0, 1] and t > 0.
double dvariance_dh(const EvalPoint& p, const quad::QuadConfig& cfg = {});

/// ∂²V/∂H² = e^{kt} [ 4 t^{2H} log² t + 4k ∫_0^t sinh(k(t−z)) z^{2H} log² z dz ] > 0.
double d2variance_dh2(const EvalPoint& p, const quad::QuadConfig& cfg = {});

/// ∂V/∂t = k e^{kt} t^{2H} + 2H e^{kt} t^{2H−1} + k² e^{2kt} ∫_0^t e^{−kz} z^{2H} dz, t > 0.
double dvariance_dt(const EvalPoint& p, const quad::QuadConfig& cfg = {});

/// lim_{t→∞} e^{−2t} V(H, 1, t) = Γ(2H+1)/2.
double asymptotic_limit(double hurst);

}  // namespace ewifg
