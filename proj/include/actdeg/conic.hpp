#pragma once

// Conic program in the form
//
//   minimize    c'x
//   subject to  b - A x = s,   s in K
//
// where K is a product of nonnegative orthants, second-order cones and
// positive semidefinite cones. PSD blocks are stored as scaled lower-triangle
// vectors (svec), so the Euclidean inner product of two svec vectors equals
// the trace inner product of the matrices.

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "actdeg/errors.hpp"

namespace actdeg {

enum class ConeKind { nonnegative, second_order, psd };

struct Cone {
  ConeKind kind;
  /// Orthant size, second-order cone size (t plus vector) or PSD order.
  int dim;

  /// Number of entries the cone occupies in s and y.
  int size() const { return kind == ConeKind::psd ? dim * (dim + 1) / 2 : dim; }
  /// Barrier degree.
  int degree() const { return kind == ConeKind::second_order ? 1 : dim; }
};

struct ConicProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<Cone> cones;

  int num_variables() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(b.size()); }

  void check() const {
    int rows = 0;
    for (const auto& k : cones) {
      if (k.dim <= 0) throw InvalidInput("cone with nonpositive dimension");
      rows += k.size();
    }
    if (rows != b.size()) throw InvalidInput("cone sizes do not add up to the number of rows of A");
    if (A.rows() != b.size() || A.cols() != c.size()) throw InvalidInput("conic data dimensions disagree");
    if (!A.allFinite() || !b.allFinite() || !c.allFinite()) throw InvalidInput("conic data is not finite");
  }
};

enum class ConicStatus { optimal, primal_infeasible, dual_infeasible, max_iterations, numerical_failure };

inline const char* to_string(ConicStatus s) {
  switch (s) {
    case ConicStatus::optimal: return "optimal";
    case ConicStatus::primal_infeasible: return "primal_infeasible";
    case ConicStatus::dual_infeasible: return "dual_infeasible";
    case ConicStatus::max_iterations: return "max_iterations";
    case ConicStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

struct ConicSettings {
  double tol_feas = 1e-10;
  double tol_gap_abs = 1e-10;
  double tol_gap_rel = 1e-10;
  double tol_infeas = 1e-10;
  int max_iterations = 200;
  double step_fraction = 0.99;
  bool equilibrate = true;
  bool verbose = false;
};

struct ConicSolution {
  ConicStatus status = ConicStatus::numerical_failure;
  /// Primal point, slack and dual multipliers. For an infeasibility outcome
  /// y (or x, s) holds the normalized certificate instead.
  Eigen::VectorXd x, s, y;
  double primal_objective = NAN;
  double dual_objective = NAN;
  double primal_residual = NAN;
  double dual_residual = NAN;
  double gap = NAN;
  /// For primal infeasibility: ||A'y|| with b'y = -1 and y in K*.
  double certificate_residual = NAN;
  int iterations = 0;
  std::string message;
};

/// Backend interface: any solver supporting the three cone kinds can be used.
class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  virtual ConicSolution solve(const ConicProblem& problem, const ConicSettings& settings) const = 0;
  virtual std::string name() const = 0;
};

namespace svec {

inline int size(int n) { return n * (n + 1) / 2; }

/// Pack a symmetric matrix (lower triangle, column-major, off-diagonals times sqrt 2).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> pack(const Eigen::MatrixBase<Derived>& m) {
  using T = typename Derived::Scalar;
  using std::sqrt;
  const int n = static_cast<int>(m.rows());
  const T r2 = sqrt(T(2));
  Eigen::Matrix<T, Eigen::Dynamic, 1> v(size(n));
  int k = 0;
  for (int j = 0; j < n; ++j) {
    v(k++) = m(j, j);
    for (int i = j + 1; i < n; ++i) v(k++) = r2 * m(i, j);
  }
  return v;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> unpack(const Eigen::MatrixBase<Derived>& v,
                                                                              int n) {
  using T = typename Derived::Scalar;
  using std::sqrt;
  const T inv_r2 = T(1) / sqrt(T(2));
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> m(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    m(j, j) = v(k++);
    for (int i = j + 1; i < n; ++i) {
      m(i, j) = v(k++) * inv_r2;
      m(j, i) = m(i, j);
    }
  }
  return m;
}

}  // namespace svec
}  // namespace actdeg
