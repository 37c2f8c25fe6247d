#pragma once

// Continuous-time LTI plumbing: the plant container, stability test, and the
// H2 / H-infinity norm oracles used to check synthesis results.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "actdeg/errors.hpp"

namespace actdeg {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Open-loop plant  x' = A x + Bu u + Bd d,  z = Cz x + Dd d.
struct StateSpace {
  MatrixXd A, Bu, Bd, Cz, Dd;

  int nx() const { return static_cast<int>(A.rows()); }
  int nu() const { return static_cast<int>(Bu.cols()); }
  int nd() const { return static_cast<int>(Bd.cols()); }
  int nz() const { return static_cast<int>(Cz.rows()); }

  void check() const {
    if (A.rows() != A.cols() || A.rows() == 0) throw InvalidInput("A must be square and nonempty");
    if (Bu.rows() != A.rows()) throw InvalidInput("Bu must have nx rows");
    if (Bd.rows() != A.rows()) throw InvalidInput("Bd must have nx rows");
    if (Cz.cols() != A.rows()) throw InvalidInput("Cz must have nx columns");
    if (Dd.rows() != Cz.rows() || Dd.cols() != Bd.cols()) throw InvalidInput("Dd must be nz x nd");
    if (Bu.cols() == 0 || Bd.cols() == 0 || Cz.rows() == 0) throw InvalidInput("nu, nd and nz must be positive");
    for (const MatrixXd* m : {&A, &Bu, &Bd, &Cz, &Dd})
      if (!m->allFinite()) throw InvalidInput("plant matrices must be finite");
  }
};

/// Generic  x' = A x + B u,  y = C x + D u.
struct LtiSystem {
  MatrixXd A, B, C, D;
};

/// Margin on the largest real part used by every stability test.
inline constexpr double kStabilityMargin = 1e-9;

inline bool is_hurwitz(const MatrixXd& A, double margin = kStabilityMargin) {
  if (A.rows() != A.cols()) throw InvalidInput("is_hurwitz needs a square matrix");
  if (A.rows() == 0) return true;
  Eigen::EigenSolver<MatrixXd> es(A, false);
  return es.eigenvalues().real().maxCoeff() < -margin;
}

inline bool is_hurwitz(const StateSpace& sys) {
  sys.check();
  return is_hurwitz(sys.A);
}

enum class NormKind { h2, hinf };
enum class NormMethod { lyapunov_gramian, hamiltonian_bisection, frequency_grid };

inline const char* to_string(NormKind k) { return k == NormKind::h2 ? "h2" : "hinf"; }
inline const char* to_string(NormMethod m) {
  switch (m) {
    case NormMethod::lyapunov_gramian: return "lyapunov-gramian";
    case NormMethod::hamiltonian_bisection: return "hamiltonian-bisection";
    case NormMethod::frequency_grid: return "frequency-grid";
  }
  return "?";
}

struct NormReport {
  NormKind kind = NormKind::h2;
  double value = 0.0;
  NormMethod method = NormMethod::lyapunov_gramian;
  std::vector<double> grid;  ///< frequencies (rad/s), frequency-grid method only
};

namespace detail {

inline void check_triple(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C) {
  if (A.rows() != A.cols()) throw InvalidInput("A must be square");
  if (B.rows() != A.rows()) throw InvalidInput("B must have as many rows as A");
  if (C.cols() != A.rows()) throw InvalidInput("C must have as many columns as A");
}

inline double sigma_max(const MatrixXcd& G) {
  if (G.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXcd> svd(G);
  return svd.singularValues()(0);
}

}  // namespace detail

/// G(s) = C (sI - A)^{-1} B at a complex point.
inline MatrixXcd transfer(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C, std::complex<double> s) {
  detail::check_triple(A, B, C);
  const int n = static_cast<int>(A.rows());
  MatrixXcd M = s * MatrixXcd::Identity(n, n) - A.cast<std::complex<double>>();
  Eigen::FullPivLU<MatrixXcd> lu(M);
  // Rank with a relative threshold; an exact imaginary-axis pole shows up
  // as a zero pivot at machine-precision scale.
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) throw SingularResolvent("sI - A is singular at s = " + std::to_string(s.real()) + "+" +
                                                  std::to_string(s.imag()) + "j");
  return C.cast<std::complex<double>>() * lu.solve(B.cast<std::complex<double>>());
}

inline std::vector<MatrixXcd> frequency_response(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C,
                                                 const std::vector<double>& omegas) {
  std::vector<MatrixXcd> out;
  out.reserve(omegas.size());
  for (double w : omegas) {
    if (!std::isfinite(w) || w < 0) throw InvalidInput("frequencies must be finite and nonnegative");
    out.push_back(transfer(A, B, C, {0.0, w}));
  }
  return out;
}

/// n log-spaced points in [lo, hi].
inline std::vector<double> logspace(double lo, double hi, int n) {
  if (!(lo > 0) || !(hi >= lo) || n < 1) throw InvalidInput("logspace needs 0 < lo <= hi and n >= 1");
  std::vector<double> w(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) w[i] = std::pow(10.0, n == 1 ? a : a + (b - a) * i / (n - 1));
  return w;
}

/// Solves A X + X A' + Q = 0 by Bartels-Stewart on the complex Schur form.
inline MatrixXd lyapunov(const MatrixXd& A, const MatrixXd& Q) {
  using C = std::complex<double>;
  if (A.rows() != A.cols() || Q.rows() != A.rows() || Q.cols() != A.cols())
    throw InvalidInput("lyapunov dimensions disagree");
  const int n = static_cast<int>(A.rows());
  if (n == 0) return MatrixXd(0, 0);
  Eigen::ComplexSchur<MatrixXcd> schur(A.cast<C>());
  const MatrixXcd& T = schur.matrixT();
  const MatrixXcd& U = schur.matrixU();
  const MatrixXcd F = -U.adjoint() * Q.cast<C>() * U;
  // T X + X T^H = F, column j couples to columns k > j through T^H.
  MatrixXcd X = MatrixXcd::Zero(n, n);
  for (int j = n - 1; j >= 0; --j) {
    Eigen::VectorXcd rhs = F.col(j);
    for (int k = j + 1; k < n; ++k) rhs -= std::conj(T(j, k)) * X.col(k);
    MatrixXcd M = T;
    M.diagonal().array() += std::conj(T(j, j));
    X.col(j) = M.triangularView<Eigen::Upper>().solve(rhs);
  }
  const MatrixXd R = (U * X * U.adjoint()).real();
  return (R + R.transpose()) / 2;
}

/// Controllability gramian of a Hurwitz pair.
inline MatrixXd controllability_gramian(const MatrixXd& A, const MatrixXd& B) {
  if (!is_hurwitz(A)) throw UnstableSystem("the gramian of a non-Hurwitz system is unbounded");
  return lyapunov(A, B * B.transpose());
}

/// sqrt(tr(C Wc C')) with Wc the controllability gramian.
inline NormReport h2_norm(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C) {
  detail::check_triple(A, B, C);
  if (!is_hurwitz(A)) throw UnstableSystem("H2 norm of a non-Hurwitz system is infinite");
  NormReport r;
  r.kind = NormKind::h2;
  r.method = NormMethod::lyapunov_gramian;
  if (B.size() == 0 || C.size() == 0) return r;
  const MatrixXd W = lyapunov(A, B * B.transpose());
  r.value = std::sqrt(std::max(0.0, (C * W * C.transpose()).trace()));
  return r;
}

/// Peak gain over a supplied grid.
inline NormReport hinf_norm_grid(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C, std::vector<double> omegas) {
  detail::check_triple(A, B, C);
  if (!is_hurwitz(A)) throw UnstableSystem("H-infinity norm of a non-Hurwitz system is infinite");
  NormReport r;
  r.kind = NormKind::hinf;
  r.method = NormMethod::frequency_grid;
  for (double w : omegas) r.value = std::max(r.value, detail::sigma_max(transfer(A, B, C, {0.0, w})));
  r.grid = std::move(omegas);
  return r;
}

/// sup_w sigma_max(G(jw)) by bisection on the Hamiltonian test. The value
/// returned is the upper end of the final bracket, so it never understates
/// the norm by more than the relative tolerance.
inline NormReport hinf_norm(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C, double tol = 1e-8) {
  detail::check_triple(A, B, C);
  if (!(tol > 0)) throw InvalidInput("hinf_norm tolerance must be positive");
  if (!is_hurwitz(A)) throw UnstableSystem("H-infinity norm of a non-Hurwitz system is infinite");
  NormReport r;
  r.kind = NormKind::hinf;
  r.method = NormMethod::hamiltonian_bisection;
  if (B.size() == 0 || C.size() == 0 || B.isZero(0) || C.isZero(0)) return r;

  const int n = static_cast<int>(A.rows());
  auto gain = [&](double w) { return detail::sigma_max(transfer(A, B, C, {0.0, w})); };

  // Coarse grid anchored on the pole magnitudes.
  Eigen::EigenSolver<MatrixXd> es(A, false);
  const auto poles = es.eigenvalues();
  double wmin = 1e300, wmax = 0;
  for (int i = 0; i < n; ++i) {
    const double m = std::abs(poles(i));
    wmin = std::min(wmin, m);
    wmax = std::max(wmax, m);
  }
  wmin = std::max(wmin, 1e-12);
  double lo = gain(0.0);
  double coarse = lo;
  for (double w : logspace(wmin * 1e-2, wmax * 1e2, 64)) coarse = std::max(coarse, gain(w));
  lo = coarse;
  double hi = 2.0 * coarse + 1e-300;

  const MatrixXd BB = B * B.transpose();
  const MatrixXd CC = C.transpose() * C;
  // Returns true when gamma is strictly above the norm. Imaginary-axis
  // eigenvalues are accepted only if the gain at their frequency confirms it,
  // and every confirmed gain raises the lower bound.
  auto above = [&](double g) {
    MatrixXd H(2 * n, 2 * n);
    H << A, BB / g, -CC / g, -A.transpose();
    Eigen::EigenSolver<MatrixXd> hs(H, false);
    const auto ev = hs.eigenvalues();
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    bool crossed = false;
    for (int i = 0; i < ev.size(); ++i) {
      if (std::abs(ev(i).real()) > 1e-7 * scale || ev(i).imag() < 0) continue;
      const double s = gain(ev(i).imag());
      lo = std::max(lo, s);
      if (s >= g * (1 - 1e-9)) crossed = true;
    }
    return !crossed;
  };
  while (!above(hi)) hi = std::max(2 * hi, lo * 1.01);
  while (hi - lo > tol * hi) {
    const double mid = std::sqrt(lo * hi);
    if (above(mid))
      hi = mid;
    else
      lo = std::max(lo, mid);
  }
  r.value = hi;
  return r;
}

}  // namespace actdeg
