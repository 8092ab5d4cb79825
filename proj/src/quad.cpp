#include "ewifg/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ewifg/errors.hpp"

namespace ewifg::quad {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Kronrod abscissae (positive half, descending) with the 15-point weights; the
// odd-indexed nodes are the 7-point Gauss abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double checked_eval(const Integrand& f, double x) {
  const double fx = f(x);
  if (!std::isfinite(fx)) {
    std::ostringstream msg;
    msg << "integrand returned " << fx << " at x = " << x;
    throw NonFiniteEvaluation(msg.str());
  }
  return fx;
}

void check_interval(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integration limits must be finite");
  }
  if (a > b) {
    throw DomainError("integration requires a <= b");
  }
}

double target(const QuadConfig& cfg, double value) {
  return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
}

struct Segment {
  double a;
  double b;
  double value;
  double err;
  double roundoff;
};

Segment kronrod15(const Integrand& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = checked_eval(f, centre);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = checked_eval(f, centre - dx);
    f2[j] = checked_eval(f, centre + dx);
    const double pair = f1[j] + f2[j];
    resk += kWgk[j] * pair;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) {
      resg += kWg[j / 2] * pair;
    }
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double hl = std::abs(half);
  resk *= half;
  resabs *= hl;
  resasc *= hl;
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double roundoff = 50.0 * kEps * resabs;
  err = std::max(err, roundoff);
  return {a, b, resk, err, roundoff};
}

// Shared driver for the two double exponential rules. `node` maps a transform
// parameter t to (x, weight) and reports whether x is strictly inside the
// domain. Each refinement level halves the step and adds the odd multiples.
template <typename NodeFn>
QuadResult double_exponential(const Integrand& f, const QuadConfig& cfg,
                              NodeFn node, double t_max, double tail_start) {
  const int max_level = std::clamp(cfg.max_subdivisions - 1, 0, 12);
  constexpr int kMinLevel = 4;

  double sum = 0.0;   // Σ w·f over every node visited so far
  double l1 = 0.0;    // Σ |w·f|
  double prev = 0.0;
  double estimate = 0.0;
  double h = 1.0;

  enum class Term { Outside, Negligible, Significant };
  auto add = [&](double t, double step) {
    double x = 0.0;
    double w = 0.0;
    if (!node(t, x, w) || w == 0.0) return Term::Outside;
    const double term = w * checked_eval(f, x);
    sum += term;
    l1 += std::abs(term);
    const double threshold =
        1e-2 * std::max(cfg.abs_tol, cfg.rel_tol * std::abs(sum * step));
    return std::abs(t) >= tail_start && std::abs(term * step) < threshold
               ? Term::Negligible
               : Term::Significant;
  };
  // Walks t = sign·j·step for j = 1, 1 + stride, ... until the node leaves the
  // domain or two consecutive tail terms are negligible.
  auto side = [&](double sign, int stride, double step) {
    int small = 0;
    for (int j = 1; j * step <= t_max; j += stride) {
      const Term term = add(sign * j * step, step);
      if (term == Term::Outside) break;
      if (term == Term::Significant) {
        small = 0;
      } else if (++small >= 2) {
        break;
      }
    }
  };

  QuadResult out;
  for (int level = 0; level <= max_level; ++level) {
    if (level == 0) {
      add(0.0, h);
      side(-1.0, 1, h);
      side(1.0, 1, h);
    } else {
      h *= 0.5;
      side(-1.0, 2, h);
      side(1.0, 2, h);
    }
    estimate = sum * h;
    out.subdivisions = level + 1;
    if (level >= kMinLevel) {
      const double diff = std::abs(estimate - prev);
      const double roundoff = 32.0 * kEps * l1 * h;
      out.value = estimate;
      out.abs_err = std::max(diff, roundoff);
      if (diff <= std::max(target(cfg, estimate), roundoff)) {
        out.converged = true;
        return out;
      }
    }
    prev = estimate;
  }
  out.value = estimate;
  out.abs_err = std::max(out.abs_err, std::abs(estimate - prev));
  out.converged = false;
  return out;
}

}  // namespace

void QuadConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions < 1) {
    throw DomainError("QuadConfig tolerances and budget must be positive");
  }
}

double QuadResult::require(std::string_view what) const {
  if (!converged) {
    std::ostringstream msg;
    msg << "quadrature did not converge for " << what << " (estimate " << value
        << ", error " << abs_err << ")";
    throw NonConvergence(msg.str());
  }
  return value;
}

QuadResult integrate_adaptive(const Integrand& f, double a, double b,
                              const QuadConfig& cfg) {
  cfg.validate();
  check_interval(a, b);
  if (a == b) return {0.0, 0.0, 1, true};

  auto worse = [](const Segment& x, const Segment& y) { return x.err < y.err; };
  std::vector<Segment> heap{kronrod15(f, a, b)};
  double total = heap.front().value;
  double total_err = heap.front().err;
  double roundoff = heap.front().roundoff;

  while (total_err > target(cfg, total)) {
    if (static_cast<int>(heap.size()) >= cfg.max_subdivisions) {
      return {total, total_err, static_cast<int>(heap.size()), false};
    }
    std::pop_heap(heap.begin(), heap.end(), worse);
    const Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval exhausted at machine resolution.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), worse);
      const bool ok = total_err <= std::max(target(cfg, total), 10.0 * roundoff);
      return {total, total_err, static_cast<int>(heap.size()), ok};
    }
    const Segment left = kronrod15(f, worst.a, mid);
    const Segment right = kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    roundoff += left.roundoff + right.roundoff - worst.roundoff;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), worse);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), worse);
  }
  // Re-sum to shed the drift of the running update.
  double value = 0.0;
  double err = 0.0;
  for (const Segment& s : heap) {
    value += s.value;
    err += s.err;
  }
  return {value, err, static_cast<int>(heap.size()), true};
}

QuadResult integrate_endpoint_singular(const Integrand& f, double a, double b,
                                       const QuadConfig& cfg) {
  cfg.validate();
  check_interval(a, b);
  if (a == b) return {0.0, 0.0, 1, true};
  const double width = b - a;
  constexpr double kHalfPi = 0.5 * std::numbers::pi;

  // x = a + width·(1 + tanh(π/2·sinh t))/2, written through the distance to
  // the nearer endpoint so nodes close to a or b keep full relative accuracy.
  auto node = [=](double t, double& x, double& w) {
    const double u = kHalfPi * std::sinh(t);
    const double e = std::exp(-2.0 * std::abs(u));
    const double d = width * e / (1.0 + e);
    x = t < 0.0 ? a + d : b - d;
    w = width * std::numbers::pi * std::cosh(t) * e / ((1.0 + e) * (1.0 + e));
    return x > a && x < b;
  };
  return double_exponential(f, cfg, node, 6.5, 2.0);
}

QuadResult integrate_semiinfinite(const Integrand& f, double a,
                                  const QuadConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(a)) throw DomainError("lower limit must be finite");
  constexpr double kHalfPi = 0.5 * std::numbers::pi;

  // x = a + exp(π/2·sinh t)
  auto node = [=](double t, double& x, double& w) {
    const double d = std::exp(kHalfPi * std::sinh(t));
    x = a + d;
    w = kHalfPi * std::cosh(t) * d;
    return x > a && std::isfinite(x) && std::isfinite(w);
  };
  return double_exponential(f, cfg, node, 6.5, 1.0);
}

}  // namespace ewifg::quad
