#include "cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ewifg/analysis.hpp"
#include "ewifg/errors.hpp"
#include "ewifg/monte_carlo.hpp"
#include "ewifg/process.hpp"
#include "ewifg/quad.hpp"

namespace ewifg::cli {

namespace {

enum class Format { Plain, Csv };

// 12 significant digits; infinities as "inf"/"-inf".
std::string num(double x) {
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void add_format_option(CLI::App* cmd, Format& format) {
  const std::map<std::string, Format> names{{"plain", Format::Plain}, {"csv", Format::Csv}};
  cmd->add_option("--format", format, "Output format")
      ->transform(CLI::CheckedTransformer(names, CLI::ignore_case))
      ->capture_default_str();
}

int env_threads() {
  const char* raw = std::getenv("EWIFG_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  return std::max(0, std::atoi(raw));
}

void print_quad_defaults(std::ostream& out) {
  const quad::QuadConfig cfg;
  out << "# quad rel_tol=" << num(cfg.rel_tol) << " abs_tol=" << num(cfg.abs_tol)
      << " max_subdivisions=" << cfg.max_subdivisions << '\n';
}

// Evaluates `fill(i)` for i in [0, n) on up to EWIFG_THREADS workers.
void parallel_for(int n, const std::function<void(int)>& fill) {
  int threads = env_threads();
  if (threads == 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) fill(i);
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
}

double lattice(double lo, double hi, int steps, int i) {
  return steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
}

struct EvalArgs {
  double hurst = 0.5;
  double time = 1.0;
  double rate = 1.0;
  Format format = Format::Plain;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const EvalPoint p{a.hurst, a.time, a.rate};
  const VarianceValue v = variance(p);
  const double entropy = gaussian_entropy(v.value);
  if (a.format == Format::Csv) {
    out << "H,t,k,variance,entropy,method,abs_err\n"
        << num(a.hurst) << ',' << num(a.time) << ',' << num(a.rate) << ',' << num(v.value) << ','
        << num(entropy) << ',' << to_string(v.method) << ',' << num(v.abs_err) << '\n';
    return kSuccess;
  }
  out << "# eval H=" << num(a.hurst) << " t=" << num(a.time) << " k=" << num(a.rate) << '\n';
  print_quad_defaults(out);
  out << "variance = " << num(v.value) << '\n'
      << "entropy = " << num(entropy) << '\n'
      << "method = " << to_string(v.method) << '\n'
      << "abs_err = " << num(v.abs_err) << '\n';
  return kSuccess;
}

struct ScanArgs {
  double h_min = 0.0;
  double h_max = 1.0;
  int h_steps = 21;
  double t_min = 0.0;
  double t_max = 1.5;
  int t_steps = 16;
  double rate = 1.0;
  std::string output;
  Format format = Format::Csv;
};

int cmd_scan(const ScanArgs& a, std::ostream& stdout_stream) {
  if (!(a.h_min >= 0.0 && a.h_max <= 1.0 && a.h_min <= a.h_max)) {
    throw DomainError("need 0 <= h-min <= h-max <= 1");
  }
  if (!(a.t_min >= 0.0 && a.t_min <= a.t_max)) throw DomainError("need 0 <= t-min <= t-max");
  if (a.h_steps < 1 || a.t_steps < 1) throw DomainError("lattice steps must be >= 1");
  if (a.rate == 0.0) throw DomainError("rate must be non-zero");

  const int n = a.h_steps * a.t_steps;
  std::vector<double> values(static_cast<std::size_t>(n));
  std::vector<std::string> failures(static_cast<std::size_t>(n));
  parallel_for(n, [&](int idx) {
    const double h = lattice(a.h_min, a.h_max, a.h_steps, idx / a.t_steps);
    const double t = lattice(a.t_min, a.t_max, a.t_steps, idx % a.t_steps);
    try {
      values[static_cast<std::size_t>(idx)] = variance({h, t, a.rate}).value;
    } catch (const NonConvergence& e) {
      failures[static_cast<std::size_t>(idx)] = e.what();
    }
  });
  for (const auto& f : failures) {
    if (!f.empty()) throw NonConvergence(f);
  }

  std::ofstream file;
  if (!a.output.empty()) {
    file.open(a.output, std::ios::binary);
    if (!file) throw DomainError("cannot open output file " + a.output);
  }
  std::ostream& out = a.output.empty() ? stdout_stream : file;
  const char sep = a.format == Format::Csv ? ',' : ' ';
  if (a.format == Format::Plain) {
    out << "# scan H=[" << num(a.h_min) << ", " << num(a.h_max) << "] x " << a.h_steps
        << ", t=[" << num(a.t_min) << ", " << num(a.t_max) << "] x " << a.t_steps
        << ", k=" << num(a.rate) << '\n';
    print_quad_defaults(out);
    out << "# H t variance entropy\n";
  } else {
    out << "H,t,variance,entropy\n";
  }
  for (int idx = 0; idx < n; ++idx) {
    const double h = lattice(a.h_min, a.h_max, a.h_steps, idx / a.t_steps);
    const double t = lattice(a.t_min, a.t_max, a.t_steps, idx % a.t_steps);
    const double v = values[static_cast<std::size_t>(idx)];
    out << num(h) << sep << num(t) << sep << num(v) << sep << num(gaussian_entropy(v)) << '\n';
  }
  return kSuccess;
}

struct ThresholdArgs {
  double rate = 1.0;
  double tol = analysis::kDefaultRootTol;
  Format format = Format::Plain;
};

int cmd_thresholds(const ThresholdArgs& a, std::ostream& out) {
  const double k = a.rate;
  const bool csv = a.format == Format::Csv;
  if (csv) {
    out << "quantity,value,check,residual\n";
  } else {
    out << "# thresholds k=" << num(k) << " root_tol=" << num(a.tol) << '\n';
    print_quad_defaults(out);
  }
  auto row = [&](const std::string& name, double value, double check, double residual) {
    if (csv) {
      out << name << ',' << num(value) << ',' << num(check) << ',' << num(residual) << '\n';
    } else {
      out << name << " = " << num(value);
      if (!std::isnan(check)) out << "  numeric = " << num(check);
      if (!std::isnan(residual)) out << "  residual = " << num(residual);
      out << '\n';
    }
  };
  const double nan = std::nan("");

  bool ordered = true;
  try {
    const analysis::ThresholdReport r = analysis::thresholds(k, a.tol);
    row("tau1", r.tau1, nan, r.residual_tau1);
    row("tau_half", r.tau_half, nan, r.residual_tau_half);
    row("log3", r.log3, nan, nan);
    row("log_2_plus_sqrt3", r.log_2_plus_sqrt3, nan, nan);
    if (!csv) {
      out << "bracket_tau1 = [" << num(r.bracket_tau1.first) << ", "
          << num(r.bracket_tau1.second) << "]\n"
          << "bracket_tau_half = [" << num(r.bracket_tau_half.first) << ", "
          << num(r.bracket_tau_half.second) << "]\n";
    }
    ordered = r.ordered();
    if (!csv && k == 1.0) {
      out << "ordering 1 < tau1 < log3 < tau_half: " << (ordered ? "yes" : "no") << '\n';
    }
  } catch (const NoSignChange& e) {
    if (!csv) out << "# tau search failed for k=" << num(k) << ": " << e.what() << '\n';
    row("tau1", nan, nan, nan);
    row("tau_half", nan, nan, nan);
  }

  if (std::abs(k) < 2.0) {
    const auto c = analysis::crossing_time_half_one(k);
    const double t = analysis::numeric_crossing_time(0.5, 1.0, k);
    row("crossing_half_one", c.time, t, std::abs(c.time - t));
    row("crossing_half_one_variance", c.common_variance, variance({0.5, c.time, k}).value,
        std::abs(c.common_variance - variance({1.0, c.time, k}).value));
  }
  if (std::abs(k) < 1.0) {
    const auto c = analysis::crossing_time_zero_half(k);
    const double t = analysis::numeric_crossing_time(0.0, 0.5, k);
    row("crossing_zero_half", c.time, t, std::abs(c.time - t));
    row("crossing_zero_half_variance", c.common_variance, variance({0.0, c.time, k}).value,
        std::abs(c.common_variance - variance({0.5, c.time, k}).value));
  }
  if (k == 1.0) {
    const auto c = analysis::crossing_time_zero_one(a.tol);
    row("crossing_zero_one", c.analytic, c.numeric, std::abs(c.analytic - c.numeric));
  }
  return k == 1.0 && !ordered ? kValidationFailure : kSuccess;
}

struct MinimizeArgs {
  double time = 1.0;
  double rate = 1.0;
  double tol = analysis::kDefaultRootTol;
  Format format = Format::Plain;
};

int cmd_minimize(const MinimizeArgs& a, std::ostream& out) {
  const auto r = analysis::find_min_h(a.time, a.rate, a.tol);
  if (a.format == Format::Csv) {
    out << "t,k,h_star,v_min,derivative_residual,regime\n"
        << num(r.time) << ',' << num(a.rate) << ',' << num(r.h_star) << ',' << num(r.v_min) << ','
        << num(r.derivative_residual) << ',' << analysis::to_string(r.regime) << '\n';
    return kSuccess;
  }
  out << "# minimize t=" << num(a.time) << " k=" << num(a.rate) << " root_tol=" << num(a.tol)
      << '\n';
  print_quad_defaults(out);
  out << "regime = " << analysis::to_string(r.regime) << '\n'
      << "h_star = " << num(r.h_star) << '\n'
      << "v_min = " << num(r.v_min) << '\n'
      << "derivative_residual = " << num(r.derivative_residual) << '\n';
  return kSuccess;
}

struct ValidateArgs {
  mc::SimulationSpec spec;
  Format format = Format::Plain;
};

int cmd_validate(ValidateArgs a, std::ostream& out) {
  a.spec.threads = env_threads();
  const double analytic = variance({a.spec.hurst, a.spec.time, a.spec.rate}).value;
  const mc::McEstimate est = mc::estimate_variance(a.spec);
  const double z = (est.variance_hat - analytic) / est.std_error;
  const bool pass = std::abs(z) <= 4.0;
  if (a.format == Format::Csv) {
    out << "H,t,k,paths,steps,seed,analytic,mc_variance,std_error,mc_mean,z,pass\n"
        << num(a.spec.hurst) << ',' << num(a.spec.time) << ',' << num(a.spec.rate) << ','
        << a.spec.n_paths << ',' << a.spec.n_steps << ',' << a.spec.seed << ',' << num(analytic)
        << ',' << num(est.variance_hat) << ',' << num(est.std_error) << ',' << num(est.mean)
        << ',' << num(z) << ',' << (pass ? "true" : "false") << '\n';
  } else {
    out << "# validate H=" << num(a.spec.hurst) << " t=" << num(a.spec.time)
        << " k=" << num(a.spec.rate) << " paths=" << a.spec.n_paths
        << " steps=" << a.spec.n_steps << " seed=" << a.spec.seed << '\n';
    print_quad_defaults(out);
    out << "analytic = " << num(analytic) << '\n'
        << "mc_variance = " << num(est.variance_hat) << '\n'
        << "std_error = " << num(est.std_error) << '\n'
        << "mc_mean = " << num(est.mean) << '\n'
        << "z = " << num(z) << '\n'
        << "result = " << (pass ? "PASS" : "FAIL") << " (|z| <= 4)\n";
  }
  return pass ? kSuccess : kValidationFailure;
}

struct AsymptoticsArgs {
  double hurst = 0.5;
  double t_max = 30.0;
  Format format = Format::Plain;
};

int cmd_asymptotics(const AsymptoticsArgs& a, std::ostream& out) {
  if (!(a.t_max > 0.0)) throw DomainError("t-max must be positive");
  const double limit = asymptotic_limit(a.hurst);
  const bool csv = a.format == Format::Csv;
  if (csv) {
    out << "t,scaled_variance,limit,gap\n";
  } else {
    out << "# asymptotics H=" << num(a.hurst) << " k=1 t-max=" << num(a.t_max) << '\n';
    print_quad_defaults(out);
    out << "# t exp(-2t)V limit gap\n";
  }
  const char sep = csv ? ',' : ' ';
  for (const double fraction : {1.0 / 6.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}) {
    const double t = a.t_max * fraction;
    const double scaled = std::exp(-2.0 * t) * variance({a.hurst, t, 1.0}).value;
    out << num(t) << sep << num(scaled) << sep << num(limit) << sep << num(scaled - limit)
        << '\n';
  }
  return kSuccess;
}

int cmd_appendix_check(Format format, std::ostream& out) {
  constexpr double gamma = std::numbers::egamma;
  struct Item {
    int power;
    double closed_form;  // Γ'(m+1) = m!·ψ(m+1)
    int expected_sign;
  };
  const Item items[] = {{0, -gamma, -1}, {1, 1.0 - gamma, 1}, {2, 3.0 - 2.0 * gamma, 1}};
  const bool csv = format == Format::Csv;
  if (csv) {
    out << "integrand,value,closed_form,abs_diff,sign_ok\n";
  } else {
    out << "# improper integrals of exp(-z) z^m log z over (0, inf)\n";
    print_quad_defaults(out);
  }
  bool all_ok = true;
  for (const Item& item : items) {
    const int m = item.power;
    const auto r = quad::integrate_semiinfinite(
        [m](double z) { return std::exp(-z) * std::pow(z, m) * std::log(z); }, 0.0);
    const double value = r.require("log integral");
    const double diff = std::abs(value - item.closed_form);
    const bool sign_ok = (value > 0.0 ? 1 : -1) == item.expected_sign;
    const bool ok = sign_ok && diff <= 1e-7;
    all_ok = all_ok && ok;
    const std::string name = "exp(-z)*z^" + std::to_string(m) + "*log(z)";
    if (csv) {
      out << name << ',' << num(value) << ',' << num(item.closed_form) << ',' << num(diff) << ','
          << (sign_ok ? "true" : "false") << '\n';
    } else {
      out << name << " = " << num(value) << "  closed form " << num(item.closed_form)
          << "  sign " << (value > 0.0 ? '+' : '-') << (ok ? "  ok" : "  MISMATCH") << '\n';
    }
  }
  return all_ok ? kSuccess : kValidationFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variance and Shannon entropy of Wiener integrals of e^{ks} against fBm"};
  app.require_subcommand(1);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Variance and entropy at one (H, t, k)");
  eval->add_option("--hurst", eval_args.hurst, "Hurst index in [0, 1]")->required();
  eval->add_option("--time", eval_args.time, "Time t >= 0")->required();
  eval->add_option("--rate", eval_args.rate, "Exponent rate k != 0")->capture_default_str();
  add_format_option(eval, eval_args.format);

  ScanArgs scan_args;
  auto* scan = app.add_subcommand("scan", "Variance and entropy on an H x t lattice");
  scan->add_option("--h-min", scan_args.h_min)->capture_default_str();
  scan->add_option("--h-max", scan_args.h_max)->capture_default_str();
  scan->add_option("--h-steps", scan_args.h_steps, "Number of H points")->capture_default_str();
  scan->add_option("--t-min", scan_args.t_min)->capture_default_str();
  scan->add_option("--t-max", scan_args.t_max)->capture_default_str();
  scan->add_option("--t-steps", scan_args.t_steps, "Number of t points")->capture_default_str();
  scan->add_option("--rate", scan_args.rate)->capture_default_str();
  scan->add_option("--output", scan_args.output, "Write to FILE instead of stdout");
  add_format_option(scan, scan_args.format);

  ThresholdArgs threshold_args;
  auto* thresholds = app.add_subcommand("thresholds", "Monotonicity thresholds and crossings");
  thresholds->add_option("--rate", threshold_args.rate)->capture_default_str();
  thresholds->add_option("--tol", threshold_args.tol, "Root tolerance")->capture_default_str();
  add_format_option(thresholds, threshold_args.format);

  MinimizeArgs minimize_args;
  auto* minimize = app.add_subcommand("minimize", "Hurst index minimising V(., t)");
  minimize->add_option("--time", minimize_args.time)->required();
  minimize->add_option("--rate", minimize_args.rate)->capture_default_str();
  minimize->add_option("--tol", minimize_args.tol)->capture_default_str();
  add_format_option(minimize, minimize_args.format);

  ValidateArgs validate_args;
  auto* validate = app.add_subcommand("validate", "Compare the analytic variance with Monte Carlo");
  validate->add_option("--hurst", validate_args.spec.hurst)->required();
  validate->add_option("--time", validate_args.spec.time)->capture_default_str();
  validate->add_option("--rate", validate_args.spec.rate)->capture_default_str();
  validate->add_option("--paths", validate_args.spec.n_paths)->capture_default_str();
  validate->add_option("--steps", validate_args.spec.n_steps)->capture_default_str();
  validate->add_option("--seed", validate_args.spec.seed)->capture_default_str();
  add_format_option(validate, validate_args.format);

  AsymptoticsArgs asymptotics_args;
  auto* asymptotics = app.add_subcommand("asymptotics", "exp(-2t) V(H, t) against its limit");
  asymptotics->add_option("--hurst", asymptotics_args.hurst)->required();
  asymptotics->add_option("--t-max", asymptotics_args.t_max)->capture_default_str();
  add_format_option(asymptotics, asymptotics_args.format);

  Format appendix_format = Format::Plain;
  auto* appendix = app.add_subcommand("appendix-check", "Signs of three improper integrals");
  add_format_option(appendix, appendix_format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageOrDomainError;
  }

  try {
    if (eval->parsed()) return cmd_eval(eval_args, out);
    if (scan->parsed()) return cmd_scan(scan_args, out);
    if (thresholds->parsed()) return cmd_thresholds(threshold_args, out);
    if (minimize->parsed()) return cmd_minimize(minimize_args, out);
    if (validate->parsed()) return cmd_validate(validate_args, out);
    if (asymptotics->parsed()) return cmd_asymptotics(asymptotics_args, out);
    if (appendix->parsed()) return cmd_appendix_check(appendix_format, out);
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kUsageOrDomainError;
  } catch (const GridMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kUsageOrDomainError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNonConvergence;
  }
  return kUsageOrDomainError;
}

}  // namespace ewifg::cli
