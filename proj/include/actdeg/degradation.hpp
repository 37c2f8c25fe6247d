#pragma once

// Actuator fault model: a first-order lag per channel plus additive noise.
//
//   x_F' = -diag(wc) x_F + diag(wc) u,   u_applied = x_F + w_a,
//   w_a = Wa w_a_bar,  Wa = diag(1/sqrt(kappa_a)).

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "actdeg/errors.hpp"
#include "actdeg/lti.hpp"

namespace actdeg {

struct DegradationParams {
  VectorXd omega_c;  ///< cutoff frequencies (rad/s)
  VectorXd kappa_a;  ///< noise scalings, Wa = diag(1/sqrt(kappa_a))
  double gamma_xF = 0.0;

  int nu() const { return static_cast<int>(omega_c.size()); }

  void check() const {
    if (omega_c.size() == 0) throw InvalidDegradation("omega_c is empty");
    if (kappa_a.size() != omega_c.size()) throw InvalidDegradation("omega_c and kappa_a lengths differ");
    for (int i = 0; i < omega_c.size(); ++i)
      if (!(omega_c(i) > 0) || !std::isfinite(omega_c(i)))
        throw InvalidDegradation("omega_c[" + std::to_string(i) + "] must be positive");
    for (int i = 0; i < kappa_a.size(); ++i)
      if (!(kappa_a(i) > 0) || !std::isfinite(kappa_a(i)))
        throw InvalidDegradation("kappa_a[" + std::to_string(i) + "] must be positive");
    if (!(gamma_xF >= 0)) throw InvalidDegradation("gamma_xF must be nonnegative");
  }

  /// diag(1/sqrt(kappa_a)).
  MatrixXd Wa() const {
    check();
    return kappa_a.cwiseSqrt().cwiseInverse().asDiagonal();
  }
};

/// Descriptive bounds of the conceptual fault filter. Neither enters the
/// optimization: the filter below has unit DC gain and the noise bound is
/// carried by kappa_a.
struct FaultSignalBounds {
  double gamma_a = 0.0;  ///< bound on ||w_a||_2
  double gamma_u = 1.0;  ///< DC gain of the conceptual filter
};

/// The filter from u to x_F as a state-space system with D = 0.
inline LtiSystem filter_dynamics(const VectorXd& omega_c) {
  for (int i = 0; i < omega_c.size(); ++i)
    if (!(omega_c(i) > 0)) throw InvalidDegradation("omega_c[" + std::to_string(i) + "] must be positive");
  if (omega_c.size() == 0) throw InvalidDegradation("omega_c is empty");
  const int n = static_cast<int>(omega_c.size());
  LtiSystem f;
  f.A = -MatrixXd(omega_c.asDiagonal());
  f.B = omega_c.asDiagonal();
  f.C = MatrixXd::Identity(n, n);
  f.D = MatrixXd::Zero(n, n);
  return f;
}

inline LtiSystem filter_dynamics(const DegradationParams& deg) {
  deg.check();
  return filter_dynamics(deg.omega_c);
}

/// ||x -> x_F_i||_inf. The map is e_i' (sI + diag(wc))^{-1} V, a single
/// first-order lag whose peak sits at DC: ||row_i(V)|| / wc_i = ||row_i(K)||.
inline double actuator_channel_gain(const VectorXd& omega_c, const MatrixXd& V, int i) {
  if (i < 0 || i >= omega_c.size()) throw InvalidInput("actuator index out of range");
  if (V.rows() != omega_c.size()) throw InvalidInput("V must have nu rows");
  if (!(omega_c(i) > 0)) throw InvalidDegradation("omega_c[" + std::to_string(i) + "] must be positive");
  return V.row(i).norm() / omega_c(i);
}

/// Same quantity as a supremum over a frequency grid (default: 1e4 log-spaced
/// points over [1e-4 min(wc), 1e4 max(wc)]).
inline double actuator_channel_gain_grid(const VectorXd& omega_c, const MatrixXd& V, int i,
                                         std::vector<double> omegas = {}) {
  if (i < 0 || i >= omega_c.size()) throw InvalidInput("actuator index out of range");
  if (V.rows() != omega_c.size()) throw InvalidInput("V must have nu rows");
  if (!(omega_c(i) > 0)) throw InvalidDegradation("omega_c[" + std::to_string(i) + "] must be positive");
  if (omegas.empty()) omegas = logspace(1e-4 * omega_c.minCoeff(), 1e4 * omega_c.maxCoeff(), 10000);
  const LtiSystem f = filter_dynamics(omega_c);
  const MatrixXd C = MatrixXd::Identity(omega_c.size(), omega_c.size()).row(i);
  double best = 0;
  for (double w : omegas) best = std::max(best, detail::sigma_max(transfer(f.A, V, C, {0.0, w})));
  return best;
}

struct DegradationRow {
  double omega_c = 0;
  double xF_gain = 0;
  double noise_scale = 0;
};

struct DegradationReport {
  std::vector<DegradationRow> rows;
  double gamma_xF = 0;
  double objective = 0;
};

inline DegradationReport degradation_report(const DegradationParams& deg, const MatrixXd& V, double objective) {
  deg.check();
  if (V.rows() != deg.nu()) throw InvalidInput("V must have nu rows");
  DegradationReport r;
  r.gamma_xF = deg.gamma_xF;
  r.objective = objective;
  for (int i = 0; i < deg.nu(); ++i)
    r.rows.push_back({deg.omega_c(i), actuator_channel_gain(deg.omega_c, V, i), 1.0 / std::sqrt(deg.kappa_a(i))});
  return r;
}

}  // namespace actdeg
