#pragma once

// Plant, fault filter and state feedback u = K x joined into one system on
// the state (x, x_F), driven by the normalized inputs (d_bar, w_a_bar).

#include <Eigen/Dense>

#include "actdeg/degradation.hpp"
#include "actdeg/errors.hpp"
#include "actdeg/lti.hpp"

namespace actdeg {

struct AugmentedClosedLoop {
  MatrixXd Acl;  ///< [[A, Bu], [diag(wc) K, -diag(wc)]]
  MatrixXd Bcl;  ///< [[Bd Wd, Bu Wa], [0, 0]]
  MatrixXd Ccl;  ///< [Cz, 0]

  // What it was built from.
  StateSpace plant;
  MatrixXd K;
  DegradationParams deg;
  VectorXd Wd;

  int nx() const { return plant.nx(); }
  int nu() const { return plant.nu(); }

  /// Input matrix for the unnormalized signals (d, w_a): [[Bd, Bu], [0, 0]].
  MatrixXd physical_input() const {
    const int n = nx() + nu();
    MatrixXd B = MatrixXd::Zero(n, plant.nd() + plant.nu());
    B.topLeftCorner(nx(), plant.nd()) = plant.Bd;
    B.topRightCorner(nx(), plant.nu()) = plant.Bu;
    return B;
  }
};

/// Wd holds the diagonal of the disturbance scaling.
inline AugmentedClosedLoop assemble_closed_loop(const StateSpace& sys, const MatrixXd& K, const DegradationParams& deg,
                                                const VectorXd& Wd) {
  sys.check();
  deg.check();
  const int nx = sys.nx(), nu = sys.nu(), nd = sys.nd(), nz = sys.nz();
  if (K.rows() != nu || K.cols() != nx) throw InvalidInput("K must be nu x nx");
  if (deg.nu() != nu) throw InvalidInput("degradation parameters must have nu entries");
  if (Wd.size() != nd) throw InvalidInput("Wd must have nd entries");

  AugmentedClosedLoop cl;
  cl.Acl = MatrixXd::Zero(nx + nu, nx + nu);
  cl.Acl.topLeftCorner(nx, nx) = sys.A;
  cl.Acl.topRightCorner(nx, nu) = sys.Bu;
  cl.Acl.bottomLeftCorner(nu, nx) = deg.omega_c.asDiagonal() * K;
  cl.Acl.bottomRightCorner(nu, nu) = -MatrixXd(deg.omega_c.asDiagonal());

  cl.Bcl = MatrixXd::Zero(nx + nu, nd + nu);
  cl.Bcl.topLeftCorner(nx, nd) = sys.Bd * Wd.asDiagonal();
  cl.Bcl.topRightCorner(nx, nu) = sys.Bu * deg.Wa();

  cl.Ccl = MatrixXd::Zero(nz, nx + nu);
  cl.Ccl.leftCols(nx) = sys.Cz;

  cl.plant = sys;
  cl.K = K;
  cl.deg = deg;
  cl.Wd = Wd;
  return cl;
}

inline NormReport h2_norm(const AugmentedClosedLoop& cl) { return h2_norm(cl.Acl, cl.Bcl, cl.Ccl); }
inline NormReport hinf_norm(const AugmentedClosedLoop& cl, double tol = 1e-8) {
  return hinf_norm(cl.Acl, cl.Bcl, cl.Ccl, tol);
}

}  // namespace actdeg
