// Co-design of controller and tolerable actuator degradation for the F-16
// longitudinal model: solve both programs, check the certificates and compare
// gust responses.

#include <iomanip>
#include <iostream>

#include "actdeg/actdeg.hpp"

using namespace actdeg;

int main() {
  const f16::Model m = f16::model();
  const StateSpace plant = m.weighted();

  SynthesisResult results[2];
  const NormKind kinds[2] = {NormKind::hinf, NormKind::h2};
  for (int k = 0; k < 2; ++k) {
    SynthesisSpec spec;
    spec.norm_kind = kinds[k];
    spec.gamma = 0.5;
    spec.Wd = m.Wd;
    results[k] = synthesize(plant, spec);
    const auto& r = results[k];
    std::cout << to_string(kinds[k]) << ": " << to_string(r.status) << " in " << r.solver.iterations
              << " iterations\n";
    if (r.status != SynthesisStatus::optimal) return 1;

    const auto v = validate(r, plant, spec);
    std::cout << "  closed-loop norm " << r.verification->value << ", validation "
              << (v.passed() ? "passed" : "FAILED") << "\n";
    const auto rep = degradation_report(r.deg, r.V, r.objective);
    for (int i = 0; i < 3; ++i)
      std::cout << "  " << std::left << std::setw(10) << m.input_labels[i] << std::right << " omega_c "
                << std::setw(12) << rep.rows[i].omega_c << "  noise " << std::setw(10) << rep.rows[i].noise_scale
                << "\n";
  }

  GustRun run;
  run.disturbance.seed = 1;
  for (int k = 0; k < 2; ++k) {
    const auto cl = assemble_closed_loop(plant, results[k].K, results[k].deg, m.Wd);
    const auto met = response_metrics(simulate_gust(cl, run));
    std::cout << to_string(kinds[k]) << " gust response: z rms " << met.total_rms << "\n";
  }
  return 0;
}
