// One PASS/FAIL line per acceptance criterion. Drives the command-line tool
// for everything a user would run and re-derives every number independently.

#include <chrono>
#include <iomanip>
#include <fstream>
#include <iostream>
#include <sstream>

#include "actdeg/io.hpp"
#include "support.hpp"

#ifndef ACTDEG_CLI
#error "ACTDEG_CLI must name the command-line binary"
#endif

using namespace actdeg;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS  " : "FAIL  ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run(const std::string& args) { return testing_support::run(std::string(ACTDEG_CLI) + " " + args); }

struct Solve {
  int exit_code = -1;
  double seconds = 0;
  RunReport rep;
  bool loaded = false;
};

Solve synth(const std::string& model, const std::string& args, const fs::path& out) {
  Solve s;
  const auto t0 = std::chrono::steady_clock::now();
  s.exit_code = run("synth " + model + " " + args + " --out " + out.string());
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    s.rep = load_report(out.string());
    s.loaded = true;
  } catch (const Error&) {
  }
  return s;
}

bool optimal(const Solve& s) { return s.exit_code == 0 && s.loaded && s.rep.result.status == SynthesisStatus::optimal; }

AugmentedClosedLoop closed_loop(const ModelFile& m, const Solve& s) {
  return assemble_closed_loop(m.plant, s.rep.result.K, s.rep.result.deg, m.wd);
}

void hinf_certificate(const ModelFile& m, const Solve& s) {
  if (!optimal(s)) return report(false, "hinf certificate", "synth exit " + std::to_string(s.exit_code));
  const auto cl = closed_loop(m, s);
  if (!is_hurwitz(cl.Acl)) return report(false, "hinf certificate", "closed loop not Hurwitz");
  const double n = hinf_norm(cl).value, lim = 0.5 * (1 + 1e-4);
  report(n <= lim && s.seconds < 30, "hinf certificate",
         "||T||_inf = " + fmt(n) + " <= " + fmt(lim) + ", wall " + fmt(s.seconds) + " s < 30 s");
}

void h2_certificate(const ModelFile& m, const Solve& s) {
  if (!optimal(s)) return report(false, "h2 certificate", "synth exit " + std::to_string(s.exit_code));
  const auto cl = closed_loop(m, s);
  if (!is_hurwitz(cl.Acl)) return report(false, "h2 certificate", "closed loop not Hurwitz");
  const double n = h2_norm(cl).value, lim = 0.5 * (1 + 1e-4);
  report(n * n <= lim, "h2 certificate", "||T||_2^2 = " + fmt(n * n) + " <= " + fmt(lim));
}

void oracle_equivalence() {
  std::mt19937_64 rng(20261016);
  std::uniform_int_distribution<int> nx(1, 6), nio(1, 3);
  const auto grid = logspace(1e-4, 1e4, 10000);
  double worst_hinf = 0, worst_h2 = 0;
  const int plants = 25;
  for (int i = 0; i < plants; ++i) {
    const auto t = testing_support::random_triple(rng, nx(rng), nio(rng), nio(rng));
    const double b = hinf_norm(t.A, t.B, t.C).value, g = hinf_norm_grid(t.A, t.B, t.C, grid).value;
    const double l = h2_norm(t.A, t.B, t.C).value, f = testing_support::h2_by_integral(t.A, t.B, t.C);
    worst_hinf = std::max(worst_hinf, std::abs(b - g) / b);
    worst_h2 = std::max(worst_h2, std::abs(l - f) / l);
  }
  report(worst_hinf <= 1e-3 && worst_h2 <= 5e-3, "oracle equivalence",
         std::to_string(plants) + " plants, worst hinf rel " + fmt(worst_hinf) + " <= 1e-3, worst h2 rel " +
             fmt(worst_h2) + " <= 5e-3");
}

void lmi_residuals(const ModelFile& m, const std::vector<const Solve*>& solves) {
  bool ok = true;
  double worst_nsd = -INFINITY, worst_trace = -INFINITY;
  for (const auto* s : solves) {
    if (!optimal(*s)) {
      ok = false;
      continue;
    }
    const auto v = validate(s->rep.result, m.plant, s->rep.spec);
    for (const auto& c : v.checks) {
      if (c.name.rfind("lmi:", 0) == 0 || c.name.rfind("trace:", 0) == 0 || c.name.rfind("bound:", 0) == 0)
        ok = ok && c.passed;
      if (c.name == "lmi:performance") worst_nsd = std::max(worst_nsd, c.value);
      if (c.name.rfind("trace:", 0) == 0) worst_trace = std::max(worst_trace, -c.value);
    }
  }
  report(ok, "lmi residuals",
         "max eig of performance LMI " + fmt(worst_nsd) + " <= 1e-7, worst trace violation " +
             fmt(std::max(0.0, worst_trace)) + " <= 1e-8");
}

void recovery_identity(const std::vector<const Solve*>& solves) {
  bool ok = true;
  double worst = 0;
  for (const auto* s : solves) {
    if (!optimal(*s)) {
      ok = false;
      continue;
    }
    const auto& r = s->rep.result;
    const MatrixXd d = r.deg.omega_c.asDiagonal() * r.K - r.V;
    const double rel = d.cwiseAbs().maxCoeff() / r.V.cwiseAbs().maxCoeff();
    worst = std::max(worst, rel);
  }
  report(ok && worst <= 1e-9, "recovery identity", "max |diag(wc) K - V| / max |V| = " + fmt(worst) + " <= 1e-9");
}

void trends(const Solve& hi, const Solve& h2) {
  if (!optimal(hi) || !optimal(h2)) return report(false, "table trends", "a synthesis did not return optimal");
  // Actuator order: thrust, elevator, leading-edge flap.
  bool ok = true;
  std::string d;
  for (const auto* s : {&hi, &h2}) {
    const auto& w = s->rep.result.deg.omega_c;
    ok = ok && w(1) >= w(2) && w(2) >= w(0);
    d += std::string(to_string(s->rep.spec.norm_kind)) + " wc = [" + fmt(w(0)) + ", " + fmt(w(1)) + ", " +
         fmt(w(2)) + "]; ";
  }
  const VectorXd nh = hi.rep.result.deg.kappa_a.cwiseSqrt().cwiseInverse();
  const VectorXd n2 = h2.rep.result.deg.kappa_a.cwiseSqrt().cwiseInverse();
  for (int i = 0; i < 3; ++i) ok = ok && nh(i) < n2(i);
  d += "noise hinf [" + fmt(nh(0)) + ", " + fmt(nh(1)) + ", " + fmt(nh(2)) + "] < h2 [" + fmt(n2(0)) + ", " +
       fmt(n2(1)) + ", " + fmt(n2(2)) + "] (default weights)";
  report(ok, "table trends", d);
}

void simulation(const std::string& model, const fs::path& dir, const Solve& hi, const Solve& h2) {
  if (!optimal(hi) || !optimal(h2)) return report(false, "simulation", "a synthesis did not return optimal");
  int wins = 0, diverged = 0;
  double sum_h2 = 0, sum_hi = 0;
  for (int seed = 1; seed <= 10; ++seed) {
    double rms[2] = {NAN, NAN};
    const fs::path reports[2] = {dir / "h2.json", dir / "hinf.json"};
    for (int k = 0; k < 2; ++k) {
      const fs::path csv = dir / ("sim.csv");
      const int code = run("simulate " + model + " " + reports[k].string() + " --seed " + std::to_string(seed) +
                           " --out " + csv.string());
      if (code != 0) {
        ++diverged;
        continue;
      }
      rms[k] = json::parse(slurp(dir / "sim.csv.metrics.json")).at("total_rms").get<double>();
    }
    if (rms[0] < rms[1]) ++wins;
    sum_h2 += rms[0];
    sum_hi += rms[1];
  }
  report(wins >= 7 && diverged == 0, "simulation",
         "h2 z-RMS below hinf in " + std::to_string(wins) + "/10 seeds (mean " + fmt(sum_h2 / 10) + " vs " +
             fmt(sum_hi / 10) + "), " + std::to_string(diverged) + " divergent runs");
}

void infeasibility(const Solve& s) {
  const bool ok = s.exit_code == 2 && s.loaded && s.rep.result.status == SynthesisStatus::infeasible &&
                  s.rep.result.solver.conic_status == "primal_infeasible" &&
                  std::isfinite(s.rep.result.solver.certificate_residual);
  report(ok, "infeasibility", "gamma = 1e-9: exit " + std::to_string(s.exit_code) + ", status " +
                                  (s.loaded ? to_string(s.rep.result.status) : "none") + ", certificate residual " +
                                  (s.loaded ? fmt(s.rep.result.solver.certificate_residual) : "none"));
}

}  // namespace

int main() {
  const fs::path dir = testing_support::temp_dir("acceptance");
  if (run("example-f16 --out " + dir.string()) != 0) {
    std::cout << "FAIL  setup: could not write the bundled model" << std::endl;
    return 1;
  }
  const std::string model = (dir / "f16.json").string();
  const ModelFile m = load_model(model);

  const Solve hi = synth(model, "--norm hinf --gamma 0.5", dir / "hinf.json");
  const Solve h2 = synth(model, "--norm h2 --gamma 0.5", dir / "h2.json");
  const Solve inf = synth(model, "--norm hinf --gamma 1e-9", dir / "infeasible.json");

  hinf_certificate(m, hi);
  h2_certificate(m, h2);
  oracle_equivalence();
  lmi_residuals(m, {&hi, &h2});
  recovery_identity({&hi, &h2});
  trends(hi, h2);
  simulation(model, dir, hi, h2);
  infeasibility(inf);

  fs::remove_all(dir);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
