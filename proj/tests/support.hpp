#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "actdeg/lti.hpp"

namespace testing_support {

using Eigen::MatrixXd;

struct Triple {
  MatrixXd A, B, C;
};

inline MatrixXd randn(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> n(0.0, 1.0);
  MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k) m(i, k) = n(rng);
  return m;
}

/// Random Hurwitz A with spectral abscissa in [-1, -0.2].
inline MatrixXd random_stable(std::mt19937_64& rng, int n) {
  MatrixXd A = randn(rng, n, n);
  Eigen::EigenSolver<MatrixXd> es(A, false);
  const double a = es.eigenvalues().real().maxCoeff();
  std::uniform_real_distribution<double> margin(0.2, 1.0);
  A -= (a + margin(rng)) * MatrixXd::Identity(n, n);
  return A;
}

inline Triple random_triple(std::mt19937_64& rng, int nx, int m, int p) {
  return {random_stable(rng, nx), randn(rng, nx, m), randn(rng, p, nx)};
}

/// (1/pi) int_0^inf tr(G^H G) dw on a log grid, with analytic tails.
inline double h2_by_integral(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C) {
  Eigen::EigenSolver<MatrixXd> es(A, false);
  double lo = 1e300, hi = 0;
  for (int i = 0; i < A.rows(); ++i) {
    lo = std::min(lo, std::abs(es.eigenvalues()(i)));
    hi = std::max(hi, std::abs(es.eigenvalues()(i)));
  }
  const double w0 = lo * 1e-5, w1 = hi * 1e5;
  const int n = 40000;
  const double t0 = std::log(w0), t1 = std::log(w1), h = (t1 - t0) / (n - 1);
  auto f = [&](double w) { return actdeg::transfer(A, B, C, {0.0, w}).squaredNorm(); };
  double s = 0;
  for (int i = 0; i < n; ++i) {
    const double w = std::exp(t0 + i * h);
    s += (i == 0 || i == n - 1 ? 0.5 : 1.0) * f(w) * w * h;
  }
  s += w0 * f(0.0);                    // flat low-frequency tail
  s += (C * B).squaredNorm() / w1;     // 1/w^2 roll-off
  return std::sqrt(s / M_PI);
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("actdeg_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(p);
  return p;
}

/// Runs a shell command and returns its exit status.
inline int run(const std::string& cmd) {
  const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
  if (s == -1) return -1;
  return WEXITSTATUS(s);
}

}  // namespace testing_support
