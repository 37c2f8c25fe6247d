#pragma once

// Joint synthesis of the state-feedback gain and the largest tolerable
// actuator degradation under an H-infinity or H2 closed-loop bound.
//
// Both programs use the Lyapunov certificate X = blkdiag(Y, I) on the state
// (x, x_F) and the substitution V = diag(wc) K, which makes every constraint
// affine in (Y, V, wc, kappa_a). The gain is recovered as K = diag(wc)^{-1} V.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "actdeg/closed_loop.hpp"
#include "actdeg/conic.hpp"
#include "actdeg/degradation.hpp"
#include "actdeg/errors.hpp"
#include "actdeg/interior_point.hpp"
#include "actdeg/lmi.hpp"
#include "actdeg/lti.hpp"

namespace actdeg {

/// How tr(Q1) is tied to gamma in the H2 program.
///   trace: tr(Q1) <= gamma, which certifies ||G||_2^2 <= gamma.
///   norm:  tr(Q1) <= gamma^2, which certifies ||G||_2 <= gamma.
enum class H2BoundConvention { trace, norm };

inline const char* to_string(H2BoundConvention c) { return c == H2BoundConvention::trace ? "trace" : "norm"; }

struct SynthesisSpec {
  NormKind norm_kind = NormKind::hinf;
  double gamma = 0.5;
  double lambda_a = 1.0;
  double lambda_wc = 1.0;
  double lambda_xF = 1.0;
  VectorXd Wd;  ///< diagonal of the disturbance scaling; empty means identity
  /// Strictness margin of the main LMI. NaN selects 1e-8 (1 + ||A||_F).
  double eps_lmi = std::numeric_limits<double>::quiet_NaN();
  double solver_tol = 1e-7;
  double kappa_floor = 1e-10;
  double omega_floor = 1e-6;
  double verify_slack = 1e-4;
  H2BoundConvention h2_convention = H2BoundConvention::trace;

  double eps_for(const StateSpace& sys) const { return std::isnan(eps_lmi) ? 1e-8 * (1.0 + sys.A.norm()) : eps_lmi; }

  VectorXd Wd_for(const StateSpace& sys) const { return Wd.size() == 0 ? VectorXd::Ones(sys.nd()) : Wd; }

  /// Bound on tr(Q1) implied by gamma and the convention.
  double h2_trace_bound() const { return h2_convention == H2BoundConvention::trace ? gamma : gamma * gamma; }

  void check(const StateSpace& sys) const {
    if (!(gamma > 0) || !std::isfinite(gamma)) throw InvalidInput("gamma must be positive");
    for (double l : {lambda_a, lambda_wc, lambda_xF})
      if (!(l >= 0) || !std::isfinite(l)) throw InvalidInput("objective weights must be nonnegative");
    if (lambda_a == 0 && lambda_wc == 0 && lambda_xF == 0) throw InvalidInput("at least one objective weight must be positive");
    const VectorXd w = Wd_for(sys);
    if (w.size() != sys.nd()) throw InvalidInput("Wd must have nd entries");
    for (int i = 0; i < w.size(); ++i)
      if (!(w(i) > 0) || !std::isfinite(w(i))) throw InvalidInput("Wd entries must be positive");
    if (!(eps_for(sys) > 0)) throw InvalidInput("eps_lmi must be positive");
    if (!(solver_tol > 0)) throw InvalidInput("solver_tol must be positive");
    if (!(kappa_floor > 0) || !(omega_floor > 0)) throw InvalidInput("floors must be positive");
    if (!(verify_slack >= 0)) throw InvalidInput("verify_slack must be nonnegative");
  }
};

namespace detail {

inline void check_plant_for_synthesis(const StateSpace& sys) {
  sys.check();
  if (!sys.Dd.isZero(0)) throw InvalidInput("Dd must be zero: the programs assume no direct feedthrough from d to z");
  if (!is_hurwitz(sys.A))
    throw PreconditionViolation("the open-loop plant is not Hurwitz; the block-diagonal certificate needs a stable plant");
}

inline AffineExpr scalar_const(double v) { return AffineExpr::constant(MatrixXd::Constant(1, 1, v)); }

/// Variables and constraints shared by both programs.
struct CommonBlocks {
  AffineExpr Y, V, wc, ka, gx, P, M12, W22;
};

inline CommonBlocks add_common(LmiProblem& p, const StateSpace& sys, const SynthesisSpec& spec) {
  const int nx = sys.nx(), nu = sys.nu(), nd = sys.nd();
  p.add_symmetric("Y", nx);
  p.add_matrix("V", nu, nx);
  p.add_vector("omega_c", nu);
  p.add_vector("kappa_a", nu);
  p.add_scalar("gamma_xF");
  p.add_scalar("t_kappa");
  p.add_scalar("t_omega");

  CommonBlocks b;
  b.Y = p.var("Y");
  b.V = p.var("V");
  b.wc = p.var("omega_c");
  b.ka = p.var("kappa_a");
  b.gx = p.var("gamma_xF");

  b.P = AffineExpr::blocks({{b.Y * sys.A, b.Y * sys.Bu}, {b.V, -b.wc.diag()}});
  b.M12 = AffineExpr::blocks({{b.Y * sys.Bd, b.Y * sys.Bu}, {AffineExpr::zeros(nu, nd), AffineExpr::zeros(nu, nu)}});
  const VectorXd wd = spec.Wd_for(sys);
  const MatrixXd wd_inv2 = wd.array().square().inverse().matrix().asDiagonal();
  b.W22 = AffineExpr::blocks({{AffineExpr::constant(wd_inv2), AffineExpr::zeros(nd, nu)},
                              {AffineExpr::zeros(nu, nd), b.ka.diag()}});
  return b;
}

inline void add_common_tail(LmiProblem& p, const CommonBlocks& b, const StateSpace& sys, const SynthesisSpec& spec) {
  const int nx = sys.nx(), nu = sys.nu();
  const double eps = spec.eps_for(sys);
  p.add_psd("Y_lower", b.Y - eps * AffineExpr::identity(nx));
  p.add_nonnegative("kappa_floor", b.ka - AffineExpr::constant(VectorXd::Constant(nu, spec.kappa_floor)));
  p.add_nonnegative("omega_floor", b.wc - AffineExpr::constant(VectorXd::Constant(nu, spec.omega_floor)));
  p.add_nonnegative("gamma_xF_nonneg", b.gx);
  p.add_second_order("kappa_norm", p.var("t_kappa"), b.ka);
  p.add_second_order("omega_norm", p.var("t_omega"), b.wc);
  p.set_objective(spec.lambda_a * p.var("t_kappa") + spec.lambda_wc * p.var("t_omega") + spec.lambda_xF * b.gx);
}

}  // namespace detail

/// The H-infinity program. The performance LMI is stored shifted by eps I,
/// i.e. the constraint "performance" reads  L + eps I <= 0.
inline LmiProblem build_hinf_lmi(const StateSpace& sys, const SynthesisSpec& spec) {
  detail::check_plant_for_synthesis(sys);
  spec.check(sys);
  if (spec.norm_kind != NormKind::hinf) throw InvalidInput("build_hinf_lmi needs norm_kind = hinf");
  const int nx = sys.nx(), nu = sys.nu(), nd = sys.nd(), nz = sys.nz();
  const double g = spec.gamma, eps = spec.eps_for(sys);

  LmiProblem p;
  auto b = detail::add_common(p, sys, spec);
  p.add_symmetric("Q", nx);
  const AffineExpr Q = p.var("Q");

  MatrixXd C13 = MatrixXd::Zero(nx + nu, nz);
  C13.topRows(nx) = sys.Cz.transpose();
  const AffineExpr L = AffineExpr::blocks({
      {b.P + b.P.transpose(), b.M12, AffineExpr::constant(C13)},
      {b.M12.transpose(), -g * b.W22, AffineExpr::zeros(nd + nu, nz)},
      {AffineExpr::constant(C13.transpose()), AffineExpr::zeros(nz, nd + nu),
       AffineExpr::constant(-g * MatrixXd::Identity(nz, nz))},
  });
  p.add_nsd("performance", L + eps * AffineExpr::identity(L.rows()));
  p.add_psd("dc_gain", AffineExpr::blocks({{Q, b.V.transpose()}, {b.V, AffineExpr::identity(nu)}}));
  p.add_psd("Q_psd", Q);
  p.add_nonnegative("trace_Q", b.gx - Q.trace());
  detail::add_common_tail(p, b, sys, spec);
  return p;
}

/// The H2 program, with tr(Q1) bounded according to spec.h2_convention.
inline LmiProblem build_h2_lmi(const StateSpace& sys, const SynthesisSpec& spec) {
  detail::check_plant_for_synthesis(sys);
  spec.check(sys);
  if (spec.norm_kind != NormKind::h2) throw InvalidInput("build_h2_lmi needs norm_kind = h2");
  const int nx = sys.nx(), nu = sys.nu(), nz = sys.nz();
  const double eps = spec.eps_for(sys);

  LmiProblem p;
  auto b = detail::add_common(p, sys, spec);
  p.add_symmetric("Q1", nz);
  p.add_symmetric("Q2", nx);
  const AffineExpr Q1 = p.var("Q1"), Q2 = p.var("Q2");

  const AffineExpr L = AffineExpr::blocks({{b.P + b.P.transpose(), b.M12}, {b.M12.transpose(), -1.0 * b.W22}});
  p.add_nsd("performance", L + eps * AffineExpr::identity(L.rows()));
  p.add_psd("h2_gram", AffineExpr::blocks({
                           {Q1, AffineExpr::constant(sys.Cz), AffineExpr::zeros(nz, nu)},
                           {AffineExpr::constant(sys.Cz.transpose()), b.Y, AffineExpr::zeros(nx, nu)},
                           {AffineExpr::zeros(nu, nz), AffineExpr::zeros(nu, nx), AffineExpr::identity(nu)},
                       }));
  p.add_nonnegative("trace_Q1", detail::scalar_const(spec.h2_trace_bound()) - Q1.trace());
  p.add_psd("dc_gain", AffineExpr::blocks({{Q2, b.V.transpose()}, {b.V, AffineExpr::identity(nu)}}));
  p.add_nonnegative("trace_Q2", b.gx - Q2.trace());
  detail::add_common_tail(p, b, sys, spec);
  return p;
}

inline LmiProblem build_lmi(const StateSpace& sys, const SynthesisSpec& spec) {
  return spec.norm_kind == NormKind::hinf ? build_hinf_lmi(sys, spec) : build_h2_lmi(sys, spec);
}

enum class SynthesisStatus { optimal, infeasible, numerical_failure };

inline const char* to_string(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::optimal: return "optimal";
    case SynthesisStatus::infeasible: return "infeasible";
    case SynthesisStatus::numerical_failure: return "numerical-failure";
  }
  return "?";
}

struct SolverDiagnostics {
  std::string backend;
  std::string conic_status;
  std::string message;
  int iterations = 0;
  double primal_residual = NAN;
  double dual_residual = NAN;
  double gap = NAN;
  double certificate_residual = NAN;
  double seconds = 0;
};

struct SynthesisResult {
  SynthesisStatus status = SynthesisStatus::numerical_failure;
  MatrixXd K, V, Y;
  MatrixXd Q;   ///< H-infinity: Gram block of the DC-gain bound
  MatrixXd Q1;  ///< H2: output Gram block
  MatrixXd Q2;  ///< H2: Gram block of the DC-gain bound
  DegradationParams deg;
  double objective = NAN;
  std::optional<NormReport> verification;
  SolverDiagnostics solver;
};

/// K = diag(wc)^{-1} V.
inline MatrixXd recover_gain(const VectorXd& omega_c, const MatrixXd& V) {
  if (V.rows() != omega_c.size()) throw InvalidInput("V must have nu rows");
  for (int i = 0; i < omega_c.size(); ++i)
    if (!(omega_c(i) > 0)) throw InvalidDegradation("cannot recover K with a nonpositive cutoff frequency");
  return omega_c.cwiseInverse().asDiagonal() * V;
}

/// Conic tolerances used for a given solver_tol.
inline ConicSettings conic_settings_for(const SynthesisSpec& spec) {
  ConicSettings s;
  const double t = std::min(1e-9, 1e-3 * spec.solver_tol);
  s.tol_feas = t;
  s.tol_gap_abs = t;
  s.tol_gap_rel = t;
  s.tol_infeas = t;
  return s;
}

/// Closed-loop norm of the requested kind.
inline NormReport closed_loop_norm(const AugmentedClosedLoop& cl, NormKind kind) {
  return kind == NormKind::hinf ? hinf_norm(cl) : h2_norm(cl);
}

inline SynthesisResult solve(const LmiProblem& problem, const StateSpace& sys, const SynthesisSpec& spec,
                             const ConicSolver& backend) {
  SynthesisResult r;
  const ConicProblem cp = problem.to_conic();
  const auto t0 = std::chrono::steady_clock::now();
  const ConicSolution sol = backend.solve(cp, conic_settings_for(spec));
  const auto t1 = std::chrono::steady_clock::now();

  r.solver.backend = backend.name();
  r.solver.conic_status = to_string(sol.status);
  r.solver.message = sol.message;
  r.solver.iterations = sol.iterations;
  r.solver.primal_residual = sol.primal_residual;
  r.solver.dual_residual = sol.dual_residual;
  r.solver.gap = sol.gap;
  r.solver.certificate_residual = sol.certificate_residual;
  r.solver.seconds = std::chrono::duration<double>(t1 - t0).count();

  if (sol.status == ConicStatus::primal_infeasible) {
    r.status = SynthesisStatus::infeasible;
    return r;
  }
  if (sol.status != ConicStatus::optimal) {
    r.status = SynthesisStatus::numerical_failure;
    return r;
  }

  const auto& x = sol.x;
  r.Y = problem.value("Y", x);
  r.V = problem.value("V", x);
  r.deg.omega_c = problem.value("omega_c", x).col(0);
  r.deg.kappa_a = problem.value("kappa_a", x).col(0);
  r.deg.gamma_xF = problem.value("gamma_xF", x)(0, 0);
  if (problem.has("Q")) r.Q = problem.value("Q", x);
  if (problem.has("Q1")) r.Q1 = problem.value("Q1", x);
  if (problem.has("Q2")) r.Q2 = problem.value("Q2", x);
  r.objective = problem.objective_value(x);
  try {
    r.deg.check();
    r.K = recover_gain(r.deg.omega_c, r.V);
    const auto cl = assemble_closed_loop(sys, r.K, r.deg, spec.Wd_for(sys));
    if (is_hurwitz(cl.Acl)) r.verification = closed_loop_norm(cl, spec.norm_kind);
  } catch (const Error& e) {
    r.status = SynthesisStatus::numerical_failure;
    r.solver.message = e.what();
    return r;
  }
  r.status = SynthesisStatus::optimal;
  return r;
}

inline SynthesisResult solve(const LmiProblem& problem, const StateSpace& sys, const SynthesisSpec& spec) {
  return solve(problem, sys, spec, InteriorPointSolver<long double>());
}

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double value = NAN;  ///< measured quantity
  double limit = NAN;  ///< threshold it is compared with
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }
};

/// Re-derives every guarantee from (K, V, Y, Q blocks, degradation) alone:
/// closed-loop stability, the norm bound, LMI residuals, trace bounds and the
/// recovery identity. Nothing from the solver run is reused.
inline ValidationReport validate(const SynthesisResult& result, const StateSpace& sys, const SynthesisSpec& spec) {
  ValidationReport rep;
  auto add = [&](std::string name, bool ok, double value, double limit, std::string detail = {}) {
    rep.checks.push_back({std::move(name), ok, value, limit, std::move(detail)});
  };
  if (result.status != SynthesisStatus::optimal) {
    add("status", false, NAN, NAN, std::string("result status is ") + to_string(result.status));
    return rep;
  }

  AugmentedClosedLoop cl;
  try {
    cl = assemble_closed_loop(sys, result.K, result.deg, spec.Wd_for(sys));
  } catch (const Error& e) {
    add("closed_loop", false, NAN, NAN, e.what());
    return rep;
  }

  Eigen::EigenSolver<MatrixXd> es(cl.Acl, false);
  const double re_max = es.eigenvalues().real().maxCoeff();
  const bool stable = re_max < -kStabilityMargin;
  add("closed_loop_hurwitz", stable, re_max, -kStabilityMargin);

  if (stable) {
    const NormReport nr = closed_loop_norm(cl, spec.norm_kind);
    if (spec.norm_kind == NormKind::hinf) {
      add("hinf_norm", nr.value <= spec.gamma * (1 + spec.verify_slack), nr.value, spec.gamma * (1 + spec.verify_slack));
    } else {
      const bool sq = spec.h2_convention == H2BoundConvention::trace;
      const double v = sq ? nr.value * nr.value : nr.value;
      add(sq ? "h2_norm_squared" : "h2_norm", v <= spec.gamma * (1 + spec.verify_slack), v,
          spec.gamma * (1 + spec.verify_slack));
    }
  } else {
    add(spec.norm_kind == NormKind::hinf ? "hinf_norm" : "h2_norm", false, INFINITY, spec.gamma,
        "closed loop is not Hurwitz");
  }

  // LMI residuals at the reported point.
  LmiProblem p;
  try {
    p = build_lmi(sys, spec);
  } catch (const Error& e) {
    add("lmi_rebuild", false, NAN, NAN, e.what());
    return rep;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p.num_variables());
  try {
    p.assign("Y", result.Y, x);
    p.assign("V", result.V, x);
    p.assign("omega_c", result.deg.omega_c, x);
    p.assign("kappa_a", result.deg.kappa_a, x);
    p.assign("gamma_xF", MatrixXd::Constant(1, 1, result.deg.gamma_xF), x);
    p.assign("t_kappa", MatrixXd::Constant(1, 1, result.deg.kappa_a.norm()), x);
    p.assign("t_omega", MatrixXd::Constant(1, 1, result.deg.omega_c.norm()), x);
    if (p.has("Q")) p.assign("Q", result.Q, x);
    if (p.has("Q1")) p.assign("Q1", result.Q1, x);
    if (p.has("Q2")) p.assign("Q2", result.Q2, x);
  } catch (const Error& e) {
    add("lmi_variables", false, NAN, NAN, e.what());
    return rep;
  }
  const double tol = spec.solver_tol;
  for (const auto& c : p.constraints()) {
    const MatrixXd M = c.expr.evaluate(x);
    switch (c.kind) {
      case ConstraintKind::nsd: {
        Eigen::SelfAdjointEigenSolver<MatrixXd> se(M, Eigen::EigenvaluesOnly);
        const double lmax = se.eigenvalues().maxCoeff();
        add("lmi:" + c.name, lmax <= tol, lmax, tol, "largest eigenvalue");
        break;
      }
      case ConstraintKind::psd: {
        Eigen::SelfAdjointEigenSolver<MatrixXd> se(M, Eigen::EigenvaluesOnly);
        const double lmin = se.eigenvalues().minCoeff();
        add("lmi:" + c.name, lmin >= -tol, lmin, -tol, "smallest eigenvalue");
        break;
      }
      case ConstraintKind::nonnegative: {
        const double lo = M.minCoeff();
        const bool is_trace = c.name.rfind("trace_", 0) == 0;
        const double lim = is_trace ? -1e-8 : -tol;
        add((is_trace ? "trace:" : "bound:") + c.name, lo >= lim, lo, lim, "smallest slack");
        break;
      }
      case ConstraintKind::second_order: break;  // epigraph variables are set exactly above
    }
  }

  // Recovery identity diag(wc) K = V.
  const MatrixXd DK = result.deg.omega_c.asDiagonal() * result.K;
  const double scale = std::max(result.V.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double rel = (DK - result.V).cwiseAbs().maxCoeff() / scale;
  add("recovery_identity", rel <= 1e-9, rel, 1e-9, "max |diag(wc) K - V| / max |V|");
  return rep;
}

/// build -> solve -> (verification attached).
inline SynthesisResult synthesize(const StateSpace& sys, const SynthesisSpec& spec, const ConicSolver& backend) {
  return solve(build_lmi(sys, spec), sys, spec, backend);
}

inline SynthesisResult synthesize(const StateSpace& sys, const SynthesisSpec& spec) {
  return synthesize(sys, spec, InteriorPointSolver<long double>());
}

}  // namespace actdeg
