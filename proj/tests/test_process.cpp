#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "ewifg/errors.hpp"
#include "ewifg/process.hpp"
#include "oracles.hpp"

namespace {

using ewifg::covariance;
using ewifg::covariance_high_h;
using ewifg::CovarianceMethod;
using ewifg::d2variance_dh2;
using ewifg::dvariance_dh;
using ewifg::dvariance_dt;
using ewifg::fbm_covariance;
using ewifg::shannon_entropy;
using ewifg::variance;
using ewifg::VarianceMethod;

const double kLog3 = std::log(3.0);

double V(double h, double t, double k = 1.0) { return variance({h, t, k}).value; }

TEST(FbmCovariance, Examples) {
  EXPECT_DOUBLE_EQ(fbm_covariance(0.5, 2.0, 3.0), 2.0);
  EXPECT_DOUBLE_EQ(fbm_covariance(1.0, 2.0, 3.0), 6.0);
  EXPECT_DOUBLE_EQ(fbm_covariance(0.0, 1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(fbm_covariance(0.0, 1.0, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(fbm_covariance(0.0, 0.0, 2.0), 0.0);
  EXPECT_NEAR(fbm_covariance(0.75, 1.0, 1.0), 1.0, 1e-15);
}

TEST(FbmCovariance, DomainErrors) {
  EXPECT_THROW(fbm_covariance(1.1, 1.0, 1.0), ewifg::DomainError);
  EXPECT_THROW(fbm_covariance(-0.1, 1.0, 1.0), ewifg::DomainError);
  EXPECT_THROW(fbm_covariance(0.5, -1.0, 1.0), ewifg::DomainError);
}

TEST(Variance, Examples) {
  EXPECT_NEAR(V(0.5, kLog3), 4.0, 1e-12);
  EXPECT_NEAR(V(1.0, kLog3), 4.0, 1e-12);
  EXPECT_EQ(V(0.7, 0.0), 0.0);
  EXPECT_EQ(V(0.0, 0.0), 0.0);
  EXPECT_NEAR(V(0.0, 1.0), (std::exp(2.0) + 1.0) / 2.0, 1e-12);
  EXPECT_NEAR(V(0.0, 1.0), 4.194528, 1e-6);
}

TEST(Variance, DispatchAndErrorReporting) {
  EXPECT_EQ(variance({0.0, 1.0}).method, VarianceMethod::ClosedFormH0);
  EXPECT_EQ(variance({0.5, 1.0}).method, VarianceMethod::ClosedFormHHalf);
  EXPECT_EQ(variance({1.0, 1.0}).method, VarianceMethod::ClosedFormH1);
  EXPECT_EQ(variance({0.5 + 1e-9, 1.0}).method, VarianceMethod::QuadratureGeneral);
  for (double h : {0.0, 0.5, 1.0}) EXPECT_EQ(variance({h, 1.3, -0.7}).abs_err, 0.0);
  const auto general = variance({0.3, 1.0});
  EXPECT_GT(general.abs_err, 0.0);
  EXPECT_LT(general.abs_err, 1e-9 * general.value);
}

TEST(Variance, AgreesWithCovarianceExpansionOracle) {
  for (double k : {1.0, -1.0, 0.5, 2.0}) {
    for (double h : {0.05, 0.25, 0.4, 0.6, 0.7, 0.9}) {
      for (double t : {0.3, 1.0, 2.0}) {
        const auto v = variance({h, t, k});
        EXPECT_LT(oracle::rel_diff(v.value, oracle::variance(h, t, k)), 1e-9)
            << "H=" << h << " t=" << t << " k=" << k;
      }
    }
  }
}

TEST(Variance, HighPrecisionReferenceValues) {
  // 30-digit evaluations of ∫ with the same integrand, computed offline.
  EXPECT_NEAR(V(0.25, 1.0), 3.49048857964672, 1e-11);
  EXPECT_NEAR(V(0.75, 1.0), 3.04175525060931, 1e-11);
  EXPECT_NEAR(V(0.6, 1.0), 3.12248221569252, 1e-11);
  EXPECT_NEAR(V(0.7, 1.0, -1.0), 0.414900725802370, 1e-12);
}

TEST(Variance, ClosedFormsOnGrid) {
  for (double k : {1.0, -1.0, 0.3, 2.5}) {
    for (double t = 0.1; t <= 3.0; t += 0.1) {
      EXPECT_NEAR(V(0.0, t, k), (std::exp(2 * k * t) + 1.0) / 2.0, 1e-10 * V(0.0, t, k));
      EXPECT_NEAR(V(0.5, t, k), std::expm1(2 * k * t) / (2 * k), 1e-12 * V(0.5, t, k));
      const double e = std::expm1(k * t) / k;
      EXPECT_NEAR(V(1.0, t, k), e * e, 1e-12 * e * e);
    }
  }
}

TEST(Variance, GeneralPathReproducesClosedFormsAtTheBoundary) {
  // The quadrature path evaluated a hair away from H = 1 and H = ½.
  for (double k : {1.0, -1.0}) {
    for (double t : {0.5, 1.0, kLog3, 2.0}) {
      EXPECT_NEAR(V(1.0 - 1e-9, t, k), V(1.0, t, k), 1e-7 * V(1.0, t, k));
      EXPECT_NEAR(V(0.5 + 1e-9, t, k), V(0.5, t, k), 1e-7 * V(0.5, t, k));
    }
  }
}

TEST(Variance, ContinuityAtHalf) {
  for (double t : {0.5, 1.0, 2.0}) {
    const double target = (std::exp(2 * t) - 1.0) / 2.0;
    double previous_above = INFINITY;
    double previous_below = INFINITY;
    for (int j = 1; j <= 6; ++j) {
      const double d = std::pow(10.0, -j);
      const double above = std::abs(V(0.5 + d, t) - target);
      const double below = std::abs(V(0.5 - d, t) - target);
      EXPECT_LT(above, previous_above) << "t=" << t << " j=" << j;
      EXPECT_LT(below, previous_below) << "t=" << t << " j=" << j;
      previous_above = above;
      previous_below = below;
    }
    EXPECT_LT(previous_above, 1e-4);
    EXPECT_LT(previous_below, 1e-4);
  }
}

TEST(Variance, ScalingIdentity) {
  for (int i = 0; i <= 20; ++i) {
    const double h = i / 20.0;
    for (int j = 1; j <= 16; ++j) {
      const double t = 0.1 * j;
      const double v1 = V(h, t, 1.0);
      EXPECT_LE(std::abs(V(h, t, -1.0) - std::exp(-2 * t) * v1) / v1, 1e-9)
          << "H=" << h << " t=" << t;
    }
  }
}

TEST(Variance, IncreasesInTime) {
  for (double h : {0.05, 0.3, 0.5, 0.8, 1.0}) {
    double previous = 0.0;
    for (double t = 0.1; t <= 3.0; t += 0.1) {
      const double v = V(h, t);
      EXPECT_GT(v, previous) << "H=" << h << " t=" << t;
      previous = v;
    }
  }
}

TEST(Variance, BoundaryCrossingsForUnitRate) {
  for (double t : {0.2, 0.6, 1.0, 1.09}) EXPECT_GT(V(0.5, t), V(1.0, t)) << t;
  for (double t : {1.11, 1.5, 2.5}) EXPECT_LT(V(0.5, t), V(1.0, t)) << t;
  const double t01 = std::log(2.0 + std::sqrt(3.0));
  for (double t : {0.3, 1.0, 1.2, t01 - 1e-3}) EXPECT_GT(V(0.0, t), V(1.0, t)) << t;
  for (double t : {t01 + 1e-3, 1.5, 3.0}) EXPECT_LT(V(0.0, t), V(1.0, t)) << t;
  for (double t : {0.01, 0.5, 2.0, 5.0}) EXPECT_GT(V(0.0, t), V(0.5, t)) << t;
}

TEST(Variance, GeneralRateCrossings) {
  for (double k : {-1.5, -0.5, 0.5, 1.5}) {
    const double t = std::log((k + 2.0) / (2.0 - k)) / k;
    const double common = 4.0 / ((2.0 - k) * (2.0 - k));
    EXPECT_NEAR(V(0.5, t, k), common, 1e-12 * common);
    EXPECT_NEAR(V(1.0, t, k), common, 1e-12 * common);
  }
  for (double k : {-0.9, -0.5, 0.5, 0.9}) {
    const double t = std::log((1.0 + k) / (1.0 - k)) / (2.0 * k);
    EXPECT_NEAR(V(0.0, t, k), 1.0 / (1.0 - k), 1e-12);
    EXPECT_NEAR(V(0.5, t, k), 1.0 / (1.0 - k), 1e-12);
  }
  for (double k : {2.0, 3.0, -2.0, -4.0}) {
    for (double t : {0.1, 0.5, 1.0, 2.0}) EXPECT_GT(V(0.5, t, k), V(1.0, t, k)) << k << " " << t;
  }
}

TEST(Variance, Asymptotics) {
  for (double h : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    EXPECT_LE(std::abs(std::exp(-60.0) * V(h, 30.0) - ewifg::asymptotic_limit(h)), 1e-3) << h;
  }
  EXPECT_NEAR(ewifg::asymptotic_limit(0.0), 0.5, 1e-15);
  EXPECT_NEAR(ewifg::asymptotic_limit(0.5), 0.5, 1e-15);
  EXPECT_NEAR(ewifg::asymptotic_limit(1.0), 1.0, 1e-15);
  EXPECT_NEAR(ewifg::asymptotic_limit(0.25), std::sqrt(std::numbers::pi) / 4.0, 1e-14);
}

TEST(Variance, DomainErrors) {
  EXPECT_THROW(variance({1.5, 1.0}), ewifg::DomainError);
  EXPECT_THROW(variance({0.5, -1.0}), ewifg::DomainError);
  EXPECT_THROW(variance({0.5, 1.0, 0.0}), ewifg::DomainError);
  EXPECT_THROW(variance({std::nan(""), 1.0}), ewifg::DomainError);
}

TEST(Covariance, Examples) {
  EXPECT_DOUBLE_EQ(covariance(0.0, 1.0, 2.0).value, 0.5);
  for (double h : {0.0, 0.3, 0.5, 0.75, 1.0}) EXPECT_EQ(covariance(h, 0.0, 5.0).value, 0.0);
  EXPECT_EQ(covariance(0.0, 1.0, 2.0).method, CovarianceMethod::R0Boundary);
  EXPECT_EQ(covariance(1.0, 1.0, 2.0).method, CovarianceMethod::H1Boundary);
}

TEST(Covariance, ReferenceValues) {
  EXPECT_NEAR(covariance(0.75, 1.0, 2.0, 1.0).value, 6.34837108984580, 1e-10);
  EXPECT_NEAR(covariance(0.75, 1.0, 2.0, -1.0).value, 0.472219590032888, 1e-11);
  EXPECT_NEAR(covariance(0.75, 1.0, 2.0, 0.5).value, 2.84432575988162, 1e-10);
  EXPECT_NEAR(covariance(0.75, 1.0, 2.0, 2.0).value, 42.0022870126524, 1e-9);
}

TEST(Covariance, AgreesWithExpansionOracle) {
  for (double k : {1.0, -1.0, 0.5}) {
    for (double h : {0.1, 0.3, 0.5, 0.7, 0.95, 1.0}) {
      for (auto [t, s] : {std::pair{0.5, 1.0}, std::pair{1.0, 2.0}, std::pair{2.0, 0.7}}) {
        EXPECT_LT(oracle::rel_diff(covariance(h, t, s, k).value, oracle::covariance(h, t, s, k)),
                  1e-9)
            << "H=" << h << " t=" << t << " s=" << s << " k=" << k;
      }
    }
  }
}

TEST(Covariance, HighHKernelForm) {
  EXPECT_EQ(covariance_high_h(0.75, 0.0, 3.0).value, 0.0);
  EXPECT_LT(oracle::rel_diff(covariance_high_h(0.75, 2.0, 2.0).value, V(0.75, 2.0)), 1e-6);
  EXPECT_LT(oracle::rel_diff(covariance_high_h(0.9, 1.0, 1.5).value,
                             covariance(0.9, 1.0, 1.5).value),
            1e-6);
  EXPECT_THROW(covariance_high_h(0.5, 1.0, 1.0), ewifg::DomainError);
  EXPECT_THROW(covariance_high_h(1.0, 1.0, 1.0), ewifg::DomainError);
}

TEST(Covariance, CrossFormulaAgreement) {
  for (double k : {1.0, -1.0, 0.5}) {
    for (double h : {0.55, 0.6, 0.75, 0.9, 0.99}) {
      for (double t : {0.5, 1.0, 2.0}) {
        for (double s : {0.5, 1.0, 2.0}) {
          EXPECT_LT(oracle::rel_diff(covariance(h, t, s, k).value,
                                     covariance_high_h(h, t, s, k).value),
                    1e-6)
              << "H=" << h << " t=" << t << " s=" << s << " k=" << k;
        }
      }
    }
  }
}

TEST(Covariance, ExactSymmetry) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.5);
  std::uniform_real_distribution<double> hd(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double h = hd(rng), t = u(rng), s = u(rng);
    const double k = i % 2 ? 1.0 : -0.7;
    EXPECT_EQ(covariance(h, t, s, k).value, covariance(h, s, t, k).value);
  }
}

TEST(Covariance, DiagonalMatchesVariance) {
  for (double k : {1.0, -1.0, 0.5}) {
    for (double h : {0.0, 0.2, 0.5, 0.65, 1.0}) {
      for (double t : {0.4, 1.0, 2.2}) {
        const auto c = covariance(h, t, t, k);
        const auto v = variance({h, t, k});
        EXPECT_NEAR(c.value, v.value, 10.0 * (c.abs_err + v.abs_err) + 1e-13 * v.value)
            << "H=" << h << " t=" << t << " k=" << k;
      }
    }
  }
}

TEST(Covariance, GramMatricesArePositiveSemidefinite) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (double h : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (int g = 0; g < 20; ++g) {
      std::vector<double> times(8);
      for (double& t : times) t = u(rng);
      std::sort(times.begin(), times.end());
      Eigen::MatrixXd gram(8, 8);
      for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) gram(i, j) = covariance(h, times[i], times[j]).value;
      }
      const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues()(0);
      EXPECT_GE(min_eig, -1e-8 * gram.diagonal().maxCoeff()) << "H=" << h << " grid " << g;
    }
  }
}

TEST(Entropy, Examples) {
  const double c = 0.5 * (1.0 + std::log(2.0 * std::numbers::pi));
  EXPECT_NEAR(shannon_entropy({0.5, kLog3}).value, c + 0.5 * std::log(4.0), 1e-12);
  EXPECT_NEAR(shannon_entropy({0.5, kLog3}).value, 2.112086, 1e-6);
  for (double h : {0.0, 0.3, 1.0}) {
    const auto e = shannon_entropy({h, 0.0});
    EXPECT_EQ(e.value, -std::numeric_limits<double>::infinity());
    EXPECT_FALSE(e.finite());
  }
  EXPECT_NEAR(shannon_entropy({0.3, 2.0}).value, c + 0.5 * std::log(V(0.3, 2.0)), 1e-12);
  EXPECT_TRUE(shannon_entropy({0.3, 2.0}).finite());
}

TEST(Entropy, OrderingFollowsVariance) {
  for (double t : {0.5, 1.08, 1.25, 2.0}) {
    for (int i = 0; i <= 10; ++i) {
      for (int j = 0; j <= 10; ++j) {
        const double h1 = i / 10.0, h2 = j / 10.0;
        const double dv = V(h2, t) - V(h1, t);
        const double de = shannon_entropy({h2, t}).value - shannon_entropy({h1, t}).value;
        if (dv != 0.0) EXPECT_EQ(std::signbit(dv), std::signbit(de)) << h1 << " " << h2 << " " << t;
      }
    }
  }
}

double fd_first(double h, double t, double k, double step = 1e-5) {
  return (V(h + step, t, k) - V(h - step, t, k)) / (2 * step);
}

double fd_second(double h, double t, double k, double step = 1e-3) {
  return (V(h + step, t, k) - 2 * V(h, t, k) + V(h - step, t, k)) / (step * step);
}

TEST(Derivatives, Examples) {
  EXPECT_LT(dvariance_dh({1.0, 1.0}), 0.0);
  EXPECT_LT(oracle::rel_diff(dvariance_dh({0.6, 1.0}), fd_first(0.6, 1.0, 1.0)), 1e-5);
  EXPECT_GT(d2variance_dh2({0.5, 1.0}), 0.0);
  EXPECT_GT(d2variance_dh2({0.3, 0.5}), 0.0);
  EXPECT_LT(oracle::rel_diff(d2variance_dh2({0.8, 2.0}), fd_second(0.8, 2.0, 1.0)), 1e-4);
  EXPECT_GT(dvariance_dt({0.4, 1.0}), 0.0);
  EXPECT_GT(dvariance_dt({0.75, 1.0, -1.0}), 0.0);
  EXPECT_LT(dvariance_dt({0.25, 1.0, -1.0}), 0.0);
}

TEST(Derivatives, ClosedFormsAtTheBoundaries) {
  // ∂V(1,t)/∂H = 2e^t t² log t + ∫(e^{2t−z} − e^z) z² log z dz, whose first
  // term vanishes at t = 1; at H = ½ the derivative of (e^{2t}−1)/2 in t is e^{2t}.
  for (double t : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(dvariance_dt({0.5, t}), std::exp(2 * t), 1e-9 * std::exp(2 * t));
    EXPECT_NEAR(dvariance_dt({1.0, t}), 2 * std::exp(t) * std::expm1(t),
                1e-9 * std::exp(2 * t));
    EXPECT_NEAR(dvariance_dt({0.5, t, -1.0}), std::exp(-2 * t), 1e-10);
  }
}

TEST(Derivatives, MatchFiniteDifferencesAtRandomPoints) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> hd(0.05, 0.95);
  std::uniform_real_distribution<double> td(0.2, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double h = hd(rng), t = td(rng);
    const double k = i % 3 == 0 ? -1.0 : 1.0;
    EXPECT_LT(oracle::rel_diff(dvariance_dh({h, t, k}), fd_first(h, t, k)), 1e-5)
        << "H=" << h << " t=" << t << " k=" << k;
    EXPECT_LT(oracle::rel_diff(d2variance_dh2({h, t, k}), fd_second(h, t, k)), 1e-4)
        << "H=" << h << " t=" << t << " k=" << k;
    const double dt = 1e-5;
    const double fd_t = (V(h, t + dt, k) - V(h, t - dt, k)) / (2 * dt);
    EXPECT_LT(oracle::rel_diff(dvariance_dt({h, t, k}), fd_t), 1e-5)
        << "H=" << h << " t=" << t << " k=" << k;
  }
}

TEST(Derivatives, ConvexInHurstIndex) {
  for (int i = 1; i <= 20; ++i) {
    const double h = 0.05 * i;
    for (int j = 1; j <= 15; ++j) {
      const double t = 0.2 * j;
      EXPECT_GT(d2variance_dh2({h, t}), 0.0) << "H=" << h << " t=" << t;
      EXPECT_GT(dvariance_dt({h, t}), 0.0) << "H=" << h << " t=" << t;
    }
  }
}

TEST(Derivatives, NegativeRateSignSplit) {
  for (double h : {0.5, 0.6, 0.75, 0.9, 1.0}) {
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      EXPECT_GT(dvariance_dt({h, t, -1.0}), 0.0) << "H=" << h << " t=" << t;
    }
  }
  // Below ½ the variance still grows like t^{2H} near the origin; the
  // decrease sets in once t is of order one.
  for (double h : {0.1, 0.25, 0.4}) {
    for (double t : {3.0, 5.0, 10.0}) {
      EXPECT_LT(dvariance_dt({h, t, -1.0}), 0.0) << "H=" << h << " t=" << t;
    }
  }
}

TEST(Derivatives, DomainErrors) {
  EXPECT_THROW(dvariance_dh({0.5, 0.0}), ewifg::DomainError);
  EXPECT_THROW(d2variance_dh2({0.5, 0.0}), ewifg::DomainError);
  EXPECT_THROW(dvariance_dt({0.5, 0.0}), ewifg::DomainError);
  EXPECT_NO_THROW(dvariance_dh({0.0, 1.0}));
}

}  // namespace
