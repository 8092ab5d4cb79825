#include "ewifg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "ewifg/errors.hpp"
#include "ewifg/process.hpp"

namespace ewifg::analysis {

namespace {

// Roots are polished well below the caller's tolerance so that the reported
// residual |f(root)| is itself below it.
double polish_tol(double tol) { return std::max(std::min(tol, 1e-12), 1e-15); }

struct BracketedRoot {
  double root;
  std::pair<double, double> bracket;
};

// Root of a function that is negative before and positive after it.
BracketedRoot rising_root(const std::function<double(double)>& f, double lo, double hi,
                          double tol) {
  std::pair<double, double> bracket{lo, hi};
  if (!(f(lo) < 0.0 && f(hi) > 0.0)) {
    bracket = scan_bracket(f, 0.25, 10.0, 0.25);
  }
  return {brent_root(f, bracket.first, bracket.second, polish_tol(tol)), bracket};
}

void check_rate(double k) {
  if (k == 0.0 || !std::isfinite(k)) throw DomainError("rate k must be finite and non-zero");
}

}  // namespace

double brent_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                  int max_iterations) {
  if (!(lo <= hi)) throw DomainError("brent_root needs lo <= hi");
  if (!(tol > 0.0)) throw DomainError("brent_root needs tol > 0");
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi) || std::isnan(flo) || std::isnan(fhi)) {
    std::ostringstream msg;
    msg << "no sign change on [" << lo << ", " << hi << "]: f = " << flo << ", " << fhi;
    throw NoSignChange(msg.str());
  }
  std::uintmax_t iterations = static_cast<std::uintmax_t>(max_iterations);
  auto narrow = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  const auto [a, b] =
      boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, narrow, iterations);
  // An exact zero collapses the bracket to a == b, which also counts as narrow.
  if (!narrow(a, b)) throw MaxIterations("brent_root exhausted its iteration budget");
  return 0.5 * (a + b);
}

std::pair<double, double> scan_bracket(const std::function<double(double)>& f, double lo,
                                       double hi, double step) {
  if (!(step > 0.0) || !(lo < hi)) throw DomainError("scan_bracket needs lo < hi and step > 0");
  double a = lo;
  double fa = f(a);
  for (int i = 1;; ++i) {
    const double b = std::min(lo + i * step, hi);
    const double fb = f(b);
    if (fa == 0.0 || fb == 0.0 || std::signbit(fa) != std::signbit(fb)) return {a, b};
    if (b >= hi) break;
    a = b;
    fa = fb;
  }
  std::ostringstream msg;
  msg << "no sign change found scanning [" << lo << ", " << hi << "] in steps of " << step;
  throw NoSignChange(msg.str());
}

bool ThresholdReport::ordered() const {
  return 1.0 < tau1 && tau1 < log3 && log3 < tau_half;
}

double find_tau1(double rate, double tol, const quad::QuadConfig& cfg) {
  check_rate(rate);
  auto f = [&](double t) { return dvariance_dh({1.0, t, rate}, cfg); };
  return rising_root(f, 1.0, std::log(3.0), tol).root;
}

double find_tau_half(double rate, double tol, const quad::QuadConfig& cfg) {
  check_rate(rate);
  auto f = [&](double t) { return dvariance_dh({0.5, t, rate}, cfg); };
  return rising_root(f, std::log(3.0), 2.0, tol).root;
}

ThresholdReport thresholds(double rate, double tol, const quad::QuadConfig& cfg) {
  check_rate(rate);
  auto d1 = [&](double t) { return dvariance_dh({1.0, t, rate}, cfg); };
  auto dh = [&](double t) { return dvariance_dh({0.5, t, rate}, cfg); };
  const double log3 = std::log(3.0);
  const auto tau1 = rising_root(d1, 1.0, log3, tol);
  const auto tau_half = rising_root(dh, log3, 2.0, tol);

  ThresholdReport report;
  report.tau1 = tau1.root;
  report.tau_half = tau_half.root;
  report.log3 = log3;
  report.log_2_plus_sqrt3 = std::log(2.0 + std::sqrt(3.0));
  report.rate_k = rate;
  report.residual_tau1 = std::abs(d1(tau1.root));
  report.residual_tau_half = std::abs(dh(tau_half.root));
  report.bracket_tau1 = tau1.bracket;
  report.bracket_tau_half = tau_half.bracket;
  return report;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::DecreasingEverywhere:
      return "DecreasingEverywhere";
    case Regime::InteriorMinHighH:
      return "InteriorMinHighH";
    case Regime::InteriorMinLowH:
      return "InteriorMinLowH";
    case Regime::IncreasingOnHalfOne:
      return "IncreasingOnHalfOne";
  }
  return "?";
}

MinimumResult find_min_h(double t, double rate, double tol, const quad::QuadConfig& cfg) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("find_min_h needs t > 0");
  check_rate(rate);
  auto slope = [&](double h) { return dvariance_dh({h, t, rate}, cfg); };

  MinimumResult out;
  out.time = t;
  const double d1 = slope(1.0);
  const double d_half = slope(0.5);
  const double d0 = slope(0.0);

  if (d1 <= 0.0) {
    out.regime = Regime::DecreasingEverywhere;
    out.h_star = 1.0;
    out.derivative_residual = std::abs(d1);
  } else if (d0 >= 0.0) {
    out.regime = Regime::IncreasingOnHalfOne;
    out.h_star = 0.0;
    out.derivative_residual = std::abs(d0);
  } else {
    const bool high = d_half < 0.0;
    out.regime = high ? Regime::InteriorMinHighH : Regime::InteriorMinLowH;
    out.h_star = high ? brent_root(slope, 0.5, 1.0, polish_tol(tol))
                      : brent_root(slope, 0.0, 0.5, polish_tol(tol));
    out.derivative_residual = std::abs(slope(out.h_star));
  }
  out.v_min = variance({out.h_star, t, rate}, cfg).value;
  return out;
}

Crossing crossing_time_half_one(double rate) {
  const double k = rate;
  if (k == 0.0 || !(std::abs(k) < 2.0)) {
    throw DomainError("V(1/2,k,t) and V(1,k,t) cross only for 0 < |k| < 2");
  }
  return {std::log((k + 2.0) / (2.0 - k)) / k, 4.0 / ((2.0 - k) * (2.0 - k))};
}

Crossing crossing_time_zero_half(double rate) {
  const double k = rate;
  if (k == 0.0 || !(std::abs(k) < 1.0)) {
    throw DomainError("V(0,k,t) and V(1/2,k,t) cross only for 0 < |k| < 1");
  }
  return {std::log((1.0 + k) / (1.0 - k)) / (2.0 * k), 1.0 / (1.0 - k)};
}

ZeroOneCrossing crossing_time_zero_one(double tol) {
  ZeroOneCrossing out;
  out.analytic = std::log(2.0 + std::sqrt(3.0));
  out.numeric = numeric_crossing_time(0.0, 1.0, 1.0, polish_tol(tol));
  return out;
}

double numeric_crossing_time(double h_a, double h_b, double rate, double tol, double t_max,
                             const quad::QuadConfig& cfg) {
  check_rate(rate);
  auto gap = [&](double t) {
    return variance({h_a, t, rate}, cfg).value - variance({h_b, t, rate}, cfg).value;
  };
  constexpr double kStep = 0.05;
  const auto [lo, hi] = scan_bracket(gap, kStep, t_max, kStep);
  return brent_root(gap, lo, hi, tol);
}

}  // namespace ewifg::analysis
