#pragma once

// Sampled-data simulation of the closed loop under the gust disturbance
//   d(t) = g wn(t) + a sin(w t)
// with exact zero-order-hold discretization.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "actdeg/closed_loop.hpp"
#include "actdeg/errors.hpp"

namespace actdeg {

struct DisturbanceSpec {
  double white_noise_gain = 15.0;
  double sinusoid_amplitude = 1.0;
  double sinusoid_freq = 0.075;  ///< rad/s
  std::uint64_t seed = 0;
  double sample_rate = 100.0;    ///< Hz

  void check() const {
    if (!(sample_rate > 0) || !std::isfinite(sample_rate)) throw InvalidInput("sample_rate must be positive");
    if (!(sample_rate > 2 * sinusoid_freq / (2 * std::numbers::pi)))
      throw InvalidInput("sample_rate does not resolve the sinusoid");
    for (double v : {white_noise_gain, sinusoid_amplitude, sinusoid_freq})
      if (!std::isfinite(v)) throw InvalidInput("disturbance parameters must be finite");
  }
};

/// Number of samples covering [0, duration] at step dt, both ends included.
inline long sample_count(double duration, double dt) {
  if (!(duration > 0) || !(dt > 0)) throw InvalidInput("duration and dt must be positive");
  return static_cast<long>(std::llround(duration / dt)) + 1;
}

/// d[k] = g wn[k] + a sin(w t_k), wn[k] standard normal, t_k = k / sample_rate.
inline std::vector<double> generate_disturbance(const DisturbanceSpec& spec, double duration) {
  spec.check();
  const double dt = 1.0 / spec.sample_rate;
  const long n = sample_count(duration, dt);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> d(n);
  for (long k = 0; k < n; ++k) {
    const double t = k * dt;
    d[k] = spec.white_noise_gain * normal(rng) + spec.sinusoid_amplitude * std::sin(spec.sinusoid_freq * t);
  }
  return d;
}

/// n samples of independent standard normals per channel, scaled by `scale`.
inline MatrixXd gaussian_channels(const VectorXd& scale, long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd w(scale.size(), n);
  for (long k = 0; k < n; ++k)
    for (int i = 0; i < scale.size(); ++i) w(i, k) = scale(i) * normal(rng);
  return w;
}

struct Trajectory {
  std::vector<double> times;
  MatrixXd states;   ///< one column per sample
  MatrixXd outputs;  ///< one column per sample
  MatrixXd inputs;   ///< one column per sample, the applied exogenous vector

  long size() const { return static_cast<long>(times.size()); }
};

/// Exact ZOH: expm([[A, B], [0, 0]] dt) = [[Ad, Bd], [0, I]].
inline std::pair<MatrixXd, MatrixXd> zoh(const MatrixXd& A, const MatrixXd& B, double dt) {
  if (A.rows() != A.cols() || B.rows() != A.rows()) throw InvalidInput("zoh dimensions disagree");
  if (!(dt > 0)) throw InvalidInput("dt must be positive");
  const int n = static_cast<int>(A.rows()), m = static_cast<int>(B.cols());
  MatrixXd M = MatrixXd::Zero(n + m, n + m);
  M.topLeftCorner(n, n) = A * dt;
  M.topRightCorner(n, m) = B * dt;
  const MatrixXd E = M.exp();
  return {E.topLeftCorner(n, n), E.topRightCorner(n, m)};
}

/// x[k+1] = Ad x[k] + Bd u[k], z[k] = C x[k]. `inputs` holds one column per
/// sample; the final column is recorded but only drives the output at that
/// instant.
inline Trajectory simulate(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C, const MatrixXd& inputs,
                           const VectorXd& x0, double dt) {
  detail::check_triple(A, B, C);
  if (inputs.rows() != B.cols()) throw InvalidInput("input signal has the wrong number of channels");
  if (x0.size() != A.rows()) throw InvalidInput("initial state has the wrong size");
  if (inputs.cols() < 1) throw InvalidInput("input signal is empty");
  const auto [Ad, Bdisc] = zoh(A, B, dt);
  const long n = inputs.cols();
  Trajectory tr;
  tr.times.resize(n);
  tr.states.resize(A.rows(), n);
  tr.outputs.resize(C.rows(), n);
  tr.inputs = inputs;
  VectorXd x = x0;
  for (long k = 0; k < n; ++k) {
    tr.times[k] = k * dt;
    tr.states.col(k) = x;
    tr.outputs.col(k) = C * x;
    if (k + 1 < n) {
      x = Ad * x + Bdisc * inputs.col(k);
      if (!x.allFinite()) throw Divergence("state became non-finite", k + 1);
    }
  }
  return tr;
}

struct ResponseMetrics {
  VectorXd rms;   ///< per output channel over [t_skip, end]
  VectorXd peak;  ///< per output channel, max |z| over [t_skip, end]
  double total_rms = 0;  ///< sqrt(mean ||z||^2)
  double t_skip = 0;
  long samples = 0;
};

inline ResponseMetrics response_metrics(const Trajectory& tr, double t_skip = 0.0) {
  if (tr.size() == 0) throw InvalidInput("empty trajectory");
  long k0 = 0;
  while (k0 < tr.size() && tr.times[k0] < t_skip) ++k0;
  if (k0 >= tr.size()) throw InvalidInput("t_skip leaves no samples");
  const long n = tr.size() - k0;
  const auto z = tr.outputs.rightCols(n);
  ResponseMetrics m;
  m.t_skip = t_skip;
  m.samples = n;
  m.rms = (z.array().square().rowwise().sum() / static_cast<double>(n)).sqrt().matrix();
  m.peak = z.cwiseAbs().rowwise().maxCoeff();
  m.total_rms = std::sqrt(z.array().square().sum() / static_cast<double>(n));
  return m;
}

/// Exogenous inputs for a closed-loop gust run: row block d (physical units)
/// over w_a = Wa n, n standard normal per actuator.
struct GustRun {
  double duration = 600.0;
  double dt = 0.01;
  DisturbanceSpec disturbance;
  bool actuator_noise = true;
};

/// Simulates the closed loop from x0 = 0 under the physical disturbance d and
/// actuator noise w_a. Both enter through [[Bd, Bu], [0, 0]].
inline Trajectory simulate_gust(const AugmentedClosedLoop& cl, const GustRun& run) {
  DisturbanceSpec ds = run.disturbance;
  ds.sample_rate = 1.0 / run.dt;
  const std::vector<double> d = generate_disturbance(ds, run.duration);
  const long n = static_cast<long>(d.size());
  const int nd = cl.plant.nd(), nu = cl.plant.nu();
  MatrixXd u = MatrixXd::Zero(nd + nu, n);
  for (int i = 0; i < nd; ++i)
    for (long k = 0; k < n; ++k) u(i, k) = d[k];
  if (run.actuator_noise) {
    const VectorXd scale = cl.deg.Wa().diagonal();
    // Separate stream so d matches generate_disturbance for the same seed.
    u.bottomRows(nu) = gaussian_channels(scale, n, ds.seed ^ 0x9E3779B97F4A7C15ULL);
  }
  return simulate(cl.Acl, cl.physical_input(), cl.Ccl, u, VectorXd::Zero(cl.Acl.rows()), run.dt);
}

/// Round-trip decimal formatting.
inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

/// CSV: time, x_1..x_nx, xF_1..xF_nu, z_1..z_nz, d_1..d_nd, wa_1..wa_nu.
inline void write_csv(std::ostream& os, const Trajectory& tr, int nx, int nu, int nd) {
  const int nz = static_cast<int>(tr.outputs.rows());
  if (tr.states.rows() != nx + nu || tr.inputs.rows() != nd + nu)
    throw InvalidInput("trajectory layout does not match (nx, nu, nd)");
  os << "time";
  for (int i = 1; i <= nx; ++i) os << ",x_" << i;
  for (int i = 1; i <= nu; ++i) os << ",xF_" << i;
  for (int i = 1; i <= nz; ++i) os << ",z_" << i;
  for (int i = 1; i <= nd; ++i) os << ",d_" << i;
  for (int i = 1; i <= nu; ++i) os << ",wa_" << i;
  os << "\n";
  for (long k = 0; k < tr.size(); ++k) {
    os << format_double(tr.times[k]);
    for (int i = 0; i < nx + nu; ++i) os << ',' << format_double(tr.states(i, k));
    for (int i = 0; i < nz; ++i) os << ',' << format_double(tr.outputs(i, k));
    for (int i = 0; i < nd + nu; ++i) os << ',' << format_double(tr.inputs(i, k));
    os << "\n";
  }
}

}  // namespace actdeg
