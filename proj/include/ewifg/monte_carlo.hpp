#pragma once

// Monte Carlo oracle for the EWIFG variance: exact fBm paths on a uniform grid
// (dense Cholesky of the fBm covariance), pathwise evaluation of
// ∫_0^t e^{ks} dB^H_s and sample-variance estimation.
//
// Reproducibility: paths are produced in batches of kBatchPaths. Batch b draws
// its normals from boost::random::mt19937_64 seeded with SplitMix64(seed, b)
// through boost::random::normal_distribution (ziggurat). The batch layout does
// not depend on the thread count, and reductions use pairwise summation in
// path order, so a seed fixes every result bit for bit.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ewifg::mc {

inline constexpr int kBatchPaths = 256;

/// Uniform grid s_i = i·horizon/n_steps, i = 1..n_steps; the origin s_0 = 0
/// (where every path is 0) is implicit.
class PathGrid {
 public:
  PathGrid(double horizon, int n_steps);

  [[nodiscard]] double horizon() const { return horizon_; }
  [[nodiscard]] int n_steps() const { return n_steps_; }
  [[nodiscard]] double step() const { return horizon_ / n_steps_; }
  /// s_i for i in [0, n_steps]; time(0) == 0.
  [[nodiscard]] double time(int i) const { return i * step(); }

 private:
  double horizon_;
  int n_steps_;
};

/// Generates fBm paths on a fixed grid. The Cholesky factor is computed once
/// per generator. H = 1 bypasses the factorisation: B(s) = s·ξ.
class FbmGenerator {
 public:
  FbmGenerator(double hurst, PathGrid grid);

  [[nodiscard]] double hurst() const { return hurst_; }
  [[nodiscard]] const PathGrid& grid() const { return grid_; }

  /// Paths of batch `batch` as columns (n_steps × kBatchPaths).
  [[nodiscard]] Eigen::MatrixXd batch(std::uint64_t seed, std::uint64_t batch) const;

 private:
  double hurst_;
  PathGrid grid_;
  Eigen::MatrixXd chol_;  // lower factor; empty for H = 1
};

/// n_paths fBm paths, one per row, values at s_1..s_n.
Eigen::MatrixXd fbm_paths(double hurst, const PathGrid& grid, int n_paths, std::uint64_t seed);

/// Left-point Riemann–Stieltjes sum Σ e^{k s_i} (B(s_{i+1}) − B(s_i)), i = 0..n−1.
double integral_riemann(std::span<const double> path, const PathGrid& grid, double rate);

/// e^{kt} B(t) − k ∫_0^t e^{ks} B(s) ds with the trapezoidal rule.
double integral_by_parts(std::span<const double> path, const PathGrid& grid, double rate);

struct McEstimate {
  double mean = 0.0;
  double variance_hat = 0.0;
  double std_error = 0.0;  ///< variance_hat·√(2/(n−1))
  int n_paths = 0;
  std::uint64_t seed = 0;
};

struct SimulationSpec {
  double hurst = 0.5;
  double time = 1.0;
  double rate = 1.0;
  int n_paths = 20000;
  int n_steps = 1024;
  std::uint64_t seed = 42;
  int threads = 0;  ///< 0 = hardware concurrency
};

/// Integral samples, one per path. The Riemann sum is used for H ≥ ½ and the
/// by-parts form for H < ½. H = 0 cannot be simulated (DomainError).
std::vector<double> simulate_integrals(const SimulationSpec& spec);

/// Mean, unbiased sample variance and its standard error.
McEstimate summarize(std::span<const double> samples, std::uint64_t seed = 0);

McEstimate estimate_variance(const SimulationSpec& spec);
McEstimate estimate_variance(double hurst, double time, double rate, int n_paths, int n_steps,
                             std::uint64_t seed);

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

}  // namespace ewifg::mc
