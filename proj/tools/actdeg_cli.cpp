// actdeg: synthesis, verification and simulation front end.
//
// Exit codes: 0 ok, 1 input error, 2 infeasible, 3 numerical failure,
// 4 verification failure, 5 simulation divergence.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include "actdeg/actdeg.hpp"

namespace {

using namespace actdeg;

enum Exit { ok = 0, input_error = 1, infeasible = 2, numerical_failure = 3, verify_failure = 4, divergence = 5 };

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text;
  if (!out) throw InvalidInput("failed writing '" + path + "'");
}

/// ACTDEG_SOLVER_TOL overrides the default solver tolerance.
double solver_tol_default() {
  if (const char* s = std::getenv("ACTDEG_SOLVER_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0' || !(v > 0)) throw InvalidInput("ACTDEG_SOLVER_TOL must be a positive number");
    return v;
  }
  return SynthesisSpec{}.solver_tol;
}

void print_checks(const ValidationReport& v) {
  std::size_t w = 4;
  for (const auto& c : v.checks) w = std::max(w, c.name.size());
  for (const auto& c : v.checks) {
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(w) + 2) << c.name
              << std::right << std::setprecision(6) << std::setw(14) << c.value << "  limit " << c.limit;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
  }
}

void print_degradation(const RunReport& r) {
  if (!r.degradation) return;
  std::cout << std::left << std::setw(12) << "actuator" << std::right << std::setw(16) << "omega_c" << std::setw(16)
            << "|x->xF|inf" << std::setw(16) << "1/sqrt(kappa)" << "\n";
  for (std::size_t i = 0; i < r.degradation->rows.size(); ++i) {
    const auto& row = r.degradation->rows[i];
    const std::string label = i < r.actuator_labels.size() ? r.actuator_labels[i] : "u" + std::to_string(i + 1);
    std::cout << std::left << std::setw(12) << label << std::right << std::setprecision(6) << std::setw(16)
              << row.omega_c << std::setw(16) << row.xF_gain << std::setw(16) << row.noise_scale << "\n";
  }
}

struct SynthOptions {
  std::string model, out = "report.json", norm = "hinf", convention = "trace", dump_lmi;
  double gamma = 0.5, la = 1, lw = 1, lx = 1, tol = 0;
};

int cmd_synth(const SynthOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelFile m = load_model(o.model);
  SynthesisSpec spec;
  spec.norm_kind = io::parse_norm_kind(o.norm);
  spec.gamma = o.gamma;
  spec.lambda_a = o.la;
  spec.lambda_wc = o.lw;
  spec.lambda_xF = o.lx;
  spec.Wd = m.wd;
  spec.h2_convention = io::parse_h2_convention(o.convention);
  spec.solver_tol = o.tol > 0 ? o.tol : solver_tol_default();

  const LmiProblem problem = build_lmi(m.plant, spec);
  if (!o.dump_lmi.empty()) write_text(o.dump_lmi, problem.dump());

  RunReport rep;
  rep.spec = spec;
  rep.actuator_labels = m.input_labels;
  rep.result = solve(problem, m.plant, spec);
  if (rep.result.status == SynthesisStatus::optimal) {
    rep.degradation = degradation_report(rep.result.deg, rep.result.V, rep.result.objective);
    rep.validation = validate(rep.result, m.plant, spec);
  }
  rep.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(o.out, serialize(rep));

  std::cout << "status " << to_string(rep.result.status) << "  (" << rep.result.solver.message << ", "
            << rep.result.solver.iterations << " iterations, " << std::setprecision(3) << rep.result.solver.seconds
            << " s)\n";
  switch (rep.result.status) {
    case SynthesisStatus::infeasible:
      std::cerr << "infeasible: certificate residual " << rep.result.solver.certificate_residual << "\n";
      return infeasible;
    case SynthesisStatus::numerical_failure:
      std::cerr << "numerical failure: " << rep.result.solver.message << " (primal residual "
                << rep.result.solver.primal_residual << ", dual residual " << rep.result.solver.dual_residual
                << ", gap " << rep.result.solver.gap << ")\n";
      return numerical_failure;
    case SynthesisStatus::optimal: break;
  }
  std::cout << std::setprecision(10) << "objective " << rep.result.objective << "\n";
  if (rep.result.verification)
    std::cout << to_string(rep.result.verification->kind) << " norm " << rep.result.verification->value << "\n";
  print_degradation(rep);
  print_checks(rep.validation);
  return rep.validation.passed() ? ok : verify_failure;
}

int cmd_example_f16(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string path = (std::filesystem::path(dir) / "f16.json").string();
  write_text(path, model_to_json(f16_model_file()).dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
  return ok;
}

int cmd_verify(const std::string& model_path, const std::string& report_path) {
  const ModelFile m = load_model(model_path);
  const RunReport r = load_report(report_path);
  if (r.result.status != SynthesisStatus::optimal || r.result.K.size() == 0)
    throw InvalidInput("report does not contain an optimal gain");
  const ValidationReport v = validate(r.result, m.plant, r.spec);
  print_checks(v);
  std::cout << (v.passed() ? "verify: all checks passed\n" : "verify: FAILED\n");
  return v.passed() ? ok : verify_failure;
}

struct SimOptions {
  std::string model, report, out = "trajectory.csv", metrics;
  bool open_loop = false, no_actuator_noise = false;
  std::uint64_t seed = 0;
  double duration = 600, dt = 0.01, noise_gain = 15, sine_amplitude = 1, sine_freq = 0.075, t_skip = 0;
};

int cmd_simulate(const SimOptions& o) {
  const ModelFile m = load_model(o.model);
  const int nx = m.plant.nx(), nu = m.plant.nu();
  AugmentedClosedLoop cl;
  bool actuator_noise = !o.no_actuator_noise;
  if (o.open_loop) {
    // No feedback: the filter states stay at rest and carry no noise.
    DegradationParams deg;
    deg.omega_c = VectorXd::Ones(nu);
    deg.kappa_a = VectorXd::Ones(nu);
    cl = assemble_closed_loop(m.plant, MatrixXd::Zero(nu, nx), deg, m.wd);
    actuator_noise = false;
  } else {
    if (o.report.empty()) throw InvalidInput("simulate needs a report unless --open-loop is given");
    const RunReport r = load_report(o.report);
    if (r.result.status != SynthesisStatus::optimal) throw InvalidInput("report does not contain an optimal gain");
    cl = assemble_closed_loop(m.plant, r.result.K, r.result.deg, m.wd);
  }
  GustRun run;
  run.duration = o.duration;
  run.dt = o.dt;
  run.disturbance.seed = o.seed;
  run.disturbance.white_noise_gain = o.noise_gain;
  run.disturbance.sinusoid_amplitude = o.sine_amplitude;
  run.disturbance.sinusoid_freq = o.sine_freq;
  run.actuator_noise = actuator_noise;

  Trajectory tr;
  try {
    tr = simulate_gust(cl, run);
  } catch (const Divergence& e) {
    std::cerr << e.what() << "\n";
    return divergence;
  }
  {
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw InvalidInput("cannot write '" + o.out + "'");
    write_csv(out, tr, nx, nu, m.plant.nd());
  }
  const ResponseMetrics met = response_metrics(tr, o.t_skip);
  const json mj = {{"seed", o.seed},
                   {"duration", o.duration},
                   {"dt", o.dt},
                   {"t_skip", met.t_skip},
                   {"samples", met.samples},
                   {"rms", io::vector(met.rms)},
                   {"peak", io::vector(met.peak)},
                   {"total_rms", io::number(met.total_rms)}};
  const std::string metrics = o.metrics.empty() ? o.out + ".metrics.json" : o.metrics;
  write_text(metrics, mj.dump(2) + "\n");
  std::cout << "wrote " << o.out << " (" << tr.size() << " samples), z rms";
  for (int i = 0; i < met.rms.size(); ++i) std::cout << " " << met.rms(i);
  std::cout << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Actuator-degradation-aware state-feedback synthesis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  SynthOptions so;
  auto* synth = app.add_subcommand("synth", "Solve the H2 or H-infinity program for a model file");
  synth->add_option("model", so.model, "Model JSON")->required();
  synth->add_option("--norm", so.norm, "h2 or hinf")->check(CLI::IsMember({"h2", "hinf"}));
  synth->add_option("--gamma", so.gamma, "Performance bound");
  synth->add_option("--lambda-a", so.la, "Weight on ||kappa_a||_2");
  synth->add_option("--lambda-wc", so.lw, "Weight on ||omega_c||_2");
  synth->add_option("--lambda-xf", so.lx, "Weight on gamma_xF");
  synth->add_option("--h2-bound-convention", so.convention, "trace: tr(Q1) <= gamma; norm: tr(Q1) <= gamma^2")
      ->check(CLI::IsMember({"trace", "norm"}));
  synth->add_option("--solver-tol", so.tol, "LMI residual tolerance (default 1e-7 or ACTDEG_SOLVER_TOL)");
  synth->add_option("--out", so.out, "Report path");
  synth->add_option("--dump-lmi", so.dump_lmi, "Write the LMI problem in plain text");

  std::string example_dir = ".";
  auto* example = app.add_subcommand("example-f16", "Write the bundled F-16 model as f16.json");
  example->add_option("--out", example_dir, "Output directory");

  std::string vmodel, vreport;
  auto* verify = app.add_subcommand("verify", "Re-check a report against its model");
  verify->add_option("model", vmodel, "Model JSON")->required();
  verify->add_option("report", vreport, "Report JSON")->required();

  SimOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Gust response of the closed (or open) loop");
  simulate->add_option("model", sim.model, "Model JSON")->required();
  simulate->add_option("report", sim.report, "Report JSON");
  simulate->add_flag("--open-loop", sim.open_loop, "Simulate with K = 0");
  simulate->add_flag("--no-actuator-noise", sim.no_actuator_noise, "Set w_a = 0");
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--duration", sim.duration, "Seconds");
  simulate->add_option("--dt", sim.dt, "Step (s)");
  simulate->add_option("--noise-gain", sim.noise_gain, "White-noise gain of d");
  simulate->add_option("--sine-amplitude", sim.sine_amplitude, "Sinusoid amplitude of d");
  simulate->add_option("--sine-freq", sim.sine_freq, "Sinusoid frequency of d (rad/s)");
  simulate->add_option("--t-skip", sim.t_skip, "Transient discarded by the metrics (s)");
  simulate->add_option("--out", sim.out, "Trajectory CSV");
  simulate->add_option("--metrics", sim.metrics, "Metrics JSON (default <out>.metrics.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return input_error;
  }

  try {
    if (*synth) return cmd_synth(so);
    if (*example) return cmd_example_f16(example_dir);
    if (*verify) return cmd_verify(vmodel, vreport);
    if (*simulate) return cmd_simulate(sim);
  } catch (const Divergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return divergence;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return input_error;
  } catch (const InvalidDegradation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return input_error;
  } catch (const PreconditionViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return input_error;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numerical_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return input_error;
  }
  return input_error;
}
