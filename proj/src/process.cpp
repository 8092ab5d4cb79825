#include "ewifg/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ewifg/errors.hpp"

namespace ewifg {

namespace {

void check_hurst(double hurst) {
  if (!(hurst >= 0.0 && hurst <= 1.0)) {
    std::ostringstream msg;
    msg << "Hurst index must lie in [0, 1], got " << hurst;
    throw DomainError(msg.str());
  }
}

void check_time(double t, const char* name = "time") {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << name << " must be finite and non-negative, got " << t;
    throw DomainError(msg.str());
  }
}

void check_rate(double k) {
  if (k == 0.0 || !std::isfinite(k)) {
    throw DomainError("rate k must be finite and non-zero");
  }
}

void check_positive_time(const EvalPoint& p) {
  p.validate();
  if (p.time <= 0.0) {
    throw DomainError("H-derivatives of the variance need t > 0");
  }
}

// Accumulates a linear combination of quadrature results together with the
// matching combination of their error estimates.
struct Combination {
  double value = 0.0;
  double err = 0.0;

  void add(double coefficient, const quad::QuadResult& r, std::string_view what) {
    value += coefficient * r.require(what);
    err += std::abs(coefficient) * r.abs_err;
  }
  void add(double term) { value += term; }
};

quad::QuadResult singular(const quad::Integrand& f, double a, double b,
                          const quad::QuadConfig& cfg) {
  return quad::integrate_endpoint_singular(f, a, b, cfg);
}

// ∫_0^t sinh(|k|(t−z)) z^{2H} log^m z dz; |k| sinh(|k|x) = k sinh(kx).
quad::QuadResult sinh_moment(double hurst, double t, double k, int log_power,
                             const quad::QuadConfig& cfg) {
  const double p = 2.0 * hurst;
  const double ak = std::abs(k);
  return singular(
      [=](double z) {
        const double base = std::sinh(ak * (t - z)) * std::pow(z, p);
        switch (log_power) {
          case 0:
            return base;
          case 1:
            return base * std::log(z);
          default: {
            const double l = std::log(z);
            return base * l * l;
          }
        }
      },
      0.0, t, cfg);
}

}  // namespace

void EvalPoint::validate() const {
  check_hurst(hurst);
  check_time(time);
  check_rate(rate);
}

bool EntropyValue::finite() const { return std::isfinite(value); }

std::string_view to_string(VarianceMethod method) {
  switch (method) {
    case VarianceMethod::ClosedFormH0:
      return "ClosedFormH0";
    case VarianceMethod::ClosedFormHHalf:
      return "ClosedFormHHalf";
    case VarianceMethod::ClosedFormH1:
      return "ClosedFormH1";
    case VarianceMethod::QuadratureGeneral:
      return "QuadratureGeneral";
  }
  return "?";
}

std::string_view to_string(CovarianceMethod method) {
  switch (method) {
    case CovarianceMethod::ByPartsAllH:
      return "ByPartsAllH";
    case CovarianceMethod::SingularKernelHighH:
      return "SingularKernelHighH";
    case CovarianceMethod::R0Boundary:
      return "R0Boundary";
    case CovarianceMethod::H1Boundary:
      return "H1Boundary";
  }
  return "?";
}

double fbm_covariance(double hurst, double t, double s) {
  check_hurst(hurst);
  check_time(t, "t");
  check_time(s, "s");
  if (hurst == 1.0) return t * s;
  if (hurst == 0.0) {
    if (t == 0.0 || s == 0.0) return 0.0;
    return t == s ? 1.0 : 0.5;
  }
  const double p = 2.0 * hurst;
  return 0.5 * (std::pow(t, p) + std::pow(s, p) - std::pow(std::abs(t - s), p));
}

VarianceValue variance(const EvalPoint& pt, const quad::QuadConfig& cfg) {
  pt.validate();
  const double h = pt.hurst;
  const double t = pt.time;
  const double k = pt.rate;

  if (h == 0.0) {
    return {t == 0.0 ? 0.0 : 0.5 * (std::exp(2.0 * k * t) + 1.0),
            VarianceMethod::ClosedFormH0, 0.0};
  }
  if (h == 0.5) {
    return {std::expm1(2.0 * k * t) / (2.0 * k), VarianceMethod::ClosedFormHHalf, 0.0};
  }
  if (h == 1.0) {
    const double e = std::expm1(k * t) / k;
    return {e * e, VarianceMethod::ClosedFormH1, 0.0};
  }
  return variance_quadrature(pt, cfg);
}

VarianceValue variance_quadrature(const EvalPoint& pt, const quad::QuadConfig& cfg) {
  pt.validate();
  const double h = pt.hurst;
  const double t = pt.time;
  const double k = pt.rate;
  if (h == 0.0) throw DomainError("the quadrature form needs H > 0");
  if (t == 0.0) return {0.0, VarianceMethod::QuadratureGeneral, 0.0};

  const double scale = std::exp(k * t);
  const auto integral = sinh_moment(h, t, k, 0, cfg);
  const double ak = std::abs(k);
  const double value = scale * (std::pow(t, 2.0 * h) + ak * integral.require("variance"));
  return {value, VarianceMethod::QuadratureGeneral, scale * ak * integral.abs_err};
}

CovarianceValue covariance(double hurst, double t, double s, double rate,
                           const quad::QuadConfig& cfg) {
  check_hurst(hurst);
  check_time(t, "t");
  check_time(s, "s");
  check_rate(rate);
  const double k = rate;
  // Canonical order keeps the result exactly symmetric.
  if (s < t) std::swap(t, s);

  if (hurst == 1.0) {
    return {std::expm1(k * t) / k * (std::expm1(k * s) / k), CovarianceMethod::H1Boundary, 0.0};
  }
  if (hurst == 0.0) {
    double value = 0.0;
    if (t > 0.0) value = t == s ? 0.5 * (std::exp(2.0 * k * t) + 1.0) : 0.5;
    return {value, CovarianceMethod::R0Boundary, 0.0};
  }
  if (t == 0.0) return {0.0, CovarianceMethod::ByPartsAllH, 0.0};

  const double p = 2.0 * hurst;
  auto E = [k](double x) { return std::expm1(k * x) / k; };  // ∫_0^x e^{ku} du
  // ∫_0^x e^{ku} u^{2H} du
  auto A = [&](double x) {
    return singular([=](double u) { return std::exp(k * u) * std::pow(u, p); }, 0.0, x, cfg);
  };
  // ∫_0^x e^{ku} |y−u|^{2H} du, split at the kink u = y.
  auto C = [&](double x, double y, double coefficient, Combination& acc) {
    auto f = [=](double u) { return std::exp(k * u) * std::pow(std::abs(y - u), p); };
    if (y < x) {
      acc.add(coefficient, singular(f, 0.0, y, cfg), "covariance");
      acc.add(coefficient, singular(f, y, x, cfg), "covariance");
    } else {
      acc.add(coefficient, singular(f, 0.0, x, cfg), "covariance");
    }
  };
  // Part of ∬_{[0,x]×[0,y]} e^{k(u+v)} |u−v|^{2H} du dv over v > u, with
  // r = v − u and the u-integral done in closed form.
  auto D_half = [&](double x, double y, double coefficient, Combination& acc) {
    auto f = [=](double r) {
      const double upper = std::min(x, y - r);
      return std::pow(r, p) * std::exp(k * r) * std::expm1(2.0 * k * upper) / (2.0 * k);
    };
    if (y > x) {
      acc.add(coefficient, singular(f, 0.0, y - x, cfg), "covariance");
      acc.add(coefficient, singular(f, y - x, y, cfg), "covariance");
    } else {
      acc.add(coefficient, singular(f, 0.0, y, cfg), "covariance");
    }
  };

  const double tp = std::pow(t, p);
  const double sp = std::pow(s, p);
  const double ekt = std::exp(k * t);
  const double eks = std::exp(k * s);
  const auto At = A(t);
  const auto As = A(s);

  Combination acc;
  acc.add(0.5 * ekt * eks * (tp + sp - std::pow(s - t, p)));
  // −(k/2) e^{ks} ∫_0^t e^{ku} (u^{2H} + s^{2H} − |s−u|^{2H}) du
  acc.add(-0.5 * k * eks, At, "covariance");
  acc.add(-0.5 * k * eks * sp * E(t));
  C(t, s, 0.5 * k * eks, acc);
  // −(k/2) e^{kt} ∫_0^s e^{kv} (t^{2H} + v^{2H} − |t−v|^{2H}) dv
  acc.add(-0.5 * k * ekt, As, "covariance");
  acc.add(-0.5 * k * ekt * tp * E(s));
  C(s, t, 0.5 * k * ekt, acc);
  // (k²/2) ∬ e^{k(u+v)} (u^{2H} + v^{2H} − |u−v|^{2H}) du dv
  const double k2 = 0.5 * k * k;
  acc.add(k2 * E(s), At, "covariance");
  acc.add(k2 * E(t), As, "covariance");
  D_half(t, s, -k2, acc);
  D_half(s, t, -k2, acc);
  return {acc.value, CovarianceMethod::ByPartsAllH, acc.err};
}

CovarianceValue covariance_high_h(double hurst, double t, double s, double rate,
                                  const quad::QuadConfig& cfg) {
  if (!(hurst > 0.5 && hurst < 1.0)) {
    throw DomainError("kernel-form covariance needs 1/2 < H < 1");
  }
  check_time(t, "t");
  check_time(s, "s");
  check_rate(rate);
  if (s < t) std::swap(t, s);
  if (t == 0.0) return {0.0, CovarianceMethod::SingularKernelHighH, 0.0};

  const double k = rate;
  const double alpha = 2.0 * hurst - 1.0;
  const double inv_alpha = 1.0 / alpha;

  // One triangle of the split rectangle: the part with v − u = r > 0, u ≤ x,
  // v ≤ y. With w = r^{2H−1} the kernel r^{2H−2} dr becomes dw/(2H−1), so the
  // integrand in w is bounded.
  Combination acc;
  auto triangle = [&](double x, double y) {
    auto f = [=](double w) {
      const double r = std::pow(w, inv_alpha);
      const double upper = std::min(x, y - r);
      return std::exp(k * r) * std::expm1(2.0 * k * upper) / (2.0 * k);
    };
    const double w_end = std::pow(y, alpha);
    if (y > x) {
      const double w_kink = std::pow(y - x, alpha);
      acc.add(hurst, singular(f, 0.0, w_kink, cfg), "covariance_high_h");
      acc.add(hurst, singular(f, w_kink, w_end, cfg), "covariance_high_h");
    } else {
      acc.add(hurst, singular(f, 0.0, w_end, cfg), "covariance_high_h");
    }
  };
  triangle(t, s);
  triangle(s, t);
  return {acc.value, CovarianceMethod::SingularKernelHighH, acc.err};
}

double gaussian_entropy(double variance) {
  if (variance < 0.0 || std::isnan(variance)) {
    throw DomainError("variance must be non-negative");
  }
  if (variance == 0.0) return -std::numeric_limits<double>::infinity();
  return 0.5 * (1.0 + std::log(2.0 * std::numbers::pi)) + 0.5 * std::log(variance);
}

EntropyValue shannon_entropy(const EvalPoint& p, const quad::QuadConfig& cfg) {
  return {gaussian_entropy(variance(p, cfg).value)};
}

double dvariance_dh(const EvalPoint& pt, const quad::QuadConfig& cfg) {
  check_positive_time(pt);
  const double t = pt.time;
  const double k = pt.rate;
  const double integral = sinh_moment(pt.hurst, t, k, 1, cfg).require("dvariance_dh");
  return std::exp(k * t) *
         (2.0 * std::pow(t, 2.0 * pt.hurst) * std::log(t) + 2.0 * std::abs(k) * integral);
}

double d2variance_dh2(const EvalPoint& pt, const quad::QuadConfig& cfg) {
  check_positive_time(pt);
  const double t = pt.time;
  const double k = pt.rate;
  const double integral = sinh_moment(pt.hurst, t, k, 2, cfg).require("d2variance_dh2");
  const double lt = std::log(t);
  return std::exp(k * t) *
         (4.0 * std::pow(t, 2.0 * pt.hurst) * lt * lt + 4.0 * std::abs(k) * integral);
}

double dvariance_dt(const EvalPoint& pt, const quad::QuadConfig& cfg) {
  pt.validate();
  if (pt.time <= 0.0) throw DomainError("time derivative needs t > 0");
  const double h = pt.hurst;
  const double t = pt.time;
  const double k = pt.rate;
  const double p = 2.0 * h;
  const double ekt = std::exp(k * t);
  // e^{2kt} ∫_0^t e^{−kz} z^{2H} dz with the exponentials merged.
  const double tail =
      singular([=](double z) { return std::exp(k * (2.0 * t - z)) * std::pow(z, p); }, 0.0, t,
               cfg)
          .require("dvariance_dt");
  double value = k * ekt * std::pow(t, p) + k * k * tail;
  if (h > 0.0) value += p * ekt * std::pow(t, p - 1.0);
  return value;
}

double asymptotic_limit(double hurst) {
  check_hurst(hurst);
  return 0.5 * std::tgamma(2.0 * hurst + 1.0);
}

}  // namespace ewifg
