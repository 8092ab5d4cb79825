#include "ewifg/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "ewifg/errors.hpp"
#include "ewifg/process.hpp"

namespace ewifg::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t batch) {
  return splitmix64(seed ^ splitmix64(batch + 1));
}

void check_path(std::span<const double> path, const PathGrid& grid) {
  if (path.size() != static_cast<std::size_t>(grid.n_steps())) {
    throw GridMismatch("path length " + std::to_string(path.size()) +
                       " does not match grid with " + std::to_string(grid.n_steps()) +
                       " steps");
  }
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

PathGrid::PathGrid(double horizon, int n_steps) : horizon_(horizon), n_steps_(n_steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("grid horizon must be positive");
  }
  if (n_steps < 2) throw DomainError("grid needs at least 2 steps");
}

FbmGenerator::FbmGenerator(double hurst, PathGrid grid) : hurst_(hurst), grid_(grid) {
  if (!(hurst > 0.0 && hurst <= 1.0)) {
    throw DomainError("fBm paths can be simulated only for 0 < H <= 1");
  }
  if (hurst == 1.0) return;

  const int n = grid_.n_steps();
  Eigen::MatrixXd cov(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      cov(i, j) = fbm_covariance(hurst, grid_.time(i + 1), grid_.time(j + 1));
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);  // reads the lower triangle only
  if (llt.info() != Eigen::Success) {
    cov.diagonal().array() += 1e-12 * cov.diagonal().maxCoeff();
    llt.compute(cov);
    if (llt.info() != Eigen::Success) {
      throw CholeskyFailure("fBm covariance is not numerically positive definite");
    }
  }
  chol_ = llt.matrixL();
}

Eigen::MatrixXd FbmGenerator::batch(std::uint64_t seed, std::uint64_t batch) const {
  const int n = grid_.n_steps();
  boost::random::mt19937_64 engine(batch_seed(seed, batch));
  boost::random::normal_distribution<double> normal;

  if (hurst_ == 1.0) {
    Eigen::MatrixXd paths(n, kBatchPaths);
    for (int j = 0; j < kBatchPaths; ++j) {
      const double xi = normal(engine);
      for (int i = 0; i < n; ++i) paths(i, j) = grid_.time(i + 1) * xi;
    }
    return paths;
  }
  Eigen::MatrixXd z(n, kBatchPaths);
  for (int j = 0; j < kBatchPaths; ++j) {
    for (int i = 0; i < n; ++i) z(i, j) = normal(engine);
  }
  return chol_.triangularView<Eigen::Lower>() * z;
}

Eigen::MatrixXd fbm_paths(double hurst, const PathGrid& grid, int n_paths, std::uint64_t seed) {
  if (n_paths < 1) throw DomainError("n_paths must be at least 1");
  const FbmGenerator gen(hurst, grid);
  Eigen::MatrixXd out(n_paths, grid.n_steps());
  for (int first = 0, b = 0; first < n_paths; first += kBatchPaths, ++b) {
    const int count = std::min(kBatchPaths, n_paths - first);
    out.middleRows(first, count) = gen.batch(seed, b).leftCols(count).transpose();
  }
  return out;
}

double integral_riemann(std::span<const double> path, const PathGrid& grid, double rate) {
  check_path(path, grid);
  double sum = 0.0;
  double previous = 0.0;
  for (int i = 0; i < grid.n_steps(); ++i) {
    sum += std::exp(rate * grid.time(i)) * (path[i] - previous);
    previous = path[i];
  }
  return sum;
}

double integral_by_parts(std::span<const double> path, const PathGrid& grid, double rate) {
  check_path(path, grid);
  const int n = grid.n_steps();
  const double end = std::exp(rate * grid.horizon()) * path[n - 1];
  // Trapezoid on e^{ks} B(s); the s = 0 node contributes nothing.
  double interior = 0.0;
  for (int i = 1; i < n; ++i) interior += std::exp(rate * grid.time(i)) * path[i - 1];
  const double trapezoid = grid.step() * (interior + 0.5 * end);
  return end - rate * trapezoid;
}

std::vector<double> simulate_integrals(const SimulationSpec& spec) {
  if (spec.hurst == 0.0) {
    throw DomainError("H = 0 has no simulable paths; use the closed-form variance");
  }
  if (!(spec.time > 0.0)) throw DomainError("simulation horizon must be positive");
  if (spec.rate == 0.0 || !std::isfinite(spec.rate)) throw DomainError("rate must be non-zero");
  if (spec.n_paths < 2) throw DomainError("need at least 2 paths");

  const PathGrid grid(spec.time, spec.n_steps);
  const FbmGenerator gen(spec.hurst, grid);
  const bool riemann = spec.hurst >= 0.5;
  const int n_batches = (spec.n_paths + kBatchPaths - 1) / kBatchPaths;

  std::vector<double> samples(static_cast<std::size_t>(spec.n_paths));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int b = next++; b < n_batches; b = next++) {
      const Eigen::MatrixXd paths = gen.batch(spec.seed, static_cast<std::uint64_t>(b));
      const int first = b * kBatchPaths;
      const int count = std::min(kBatchPaths, spec.n_paths - first);
      for (int j = 0; j < count; ++j) {
        const std::span<const double> path(paths.col(j).data(),
                                           static_cast<std::size_t>(grid.n_steps()));
        samples[static_cast<std::size_t>(first + j)] =
            riemann ? integral_riemann(path, grid, spec.rate)
                    : integral_by_parts(path, grid, spec.rate);
      }
    }
  };
  const int n_threads = std::min(resolve_threads(spec.threads), n_batches);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  return samples;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

McEstimate summarize(std::span<const double> samples, std::uint64_t seed) {
  const auto n = samples.size();
  if (n < 2) throw DomainError("need at least 2 samples");
  const double mean = pairwise_sum(samples) / static_cast<double>(n);
  std::vector<double> squares(n);
  std::transform(samples.begin(), samples.end(), squares.begin(),
                 [mean](double x) { return (x - mean) * (x - mean); });
  const double var = pairwise_sum(squares) / static_cast<double>(n - 1);
  McEstimate out;
  out.mean = mean;
  out.variance_hat = var;
  out.std_error = var * std::sqrt(2.0 / static_cast<double>(n - 1));
  out.n_paths = static_cast<int>(n);
  out.seed = seed;
  return out;
}

McEstimate estimate_variance(const SimulationSpec& spec) {
  const auto samples = simulate_integrals(spec);
  return summarize(samples, spec.seed);
}

McEstimate estimate_variance(double hurst, double time, double rate, int n_paths, int n_steps,
                             std::uint64_t seed) {
  SimulationSpec spec;
  spec.hurst = hurst;
  spec.time = time;
  spec.rate = rate;
  spec.n_paths = n_paths;
  spec.n_steps = n_steps;
  spec.seed = seed;
  return estimate_variance(spec);
}

}  // namespace ewifg::mc
