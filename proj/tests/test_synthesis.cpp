#include <gtest/gtest.h>

#include <random>

#include "actdeg/f16.hpp"
#include "actdeg/synthesis.hpp"
#include "support.hpp"

using namespace actdeg;

namespace {

SynthesisSpec f16_spec(NormKind kind, double gamma = 0.5) {
  SynthesisSpec s;
  s.norm_kind = kind;
  s.gamma = gamma;
  s.Wd = f16::model().Wd;
  return s;
}

const ValidationCheck* find(const ValidationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

// Cache the two F-16 solves: each takes a fraction of a second but several
// tests inspect them.
const SynthesisResult& f16_result(NormKind kind) {
  static const SynthesisResult hinf = synthesize(f16::model().weighted(), f16_spec(NormKind::hinf));
  static const SynthesisResult h2 = synthesize(f16::model().weighted(), f16_spec(NormKind::h2));
  return kind == NormKind::hinf ? hinf : h2;
}

StateSpace random_plant(std::mt19937_64& rng, int nx, int nu, int nz) {
  StateSpace s;
  s.A = testing_support::random_stable(rng, nx);
  s.Bu = testing_support::randn(rng, nx, nu);
  s.Bd = testing_support::randn(rng, nx, 1);
  s.Cz = testing_support::randn(rng, nz, nx);
  s.Dd = MatrixXd::Zero(nz, 1);
  return s;
}

}  // namespace

TEST(BuildLmi, HinfBlockSizes) {
  const auto p = build_hinf_lmi(f16::model().weighted(), f16_spec(NormKind::hinf));
  EXPECT_EQ(p.constraint("performance").expr.rows(), 13);
  EXPECT_EQ(p.constraint("performance").kind, ConstraintKind::nsd);
  EXPECT_EQ(p.constraint("dc_gain").expr.rows(), 7);
  EXPECT_EQ(p.block("Y").rows, 4);
  EXPECT_EQ(p.block("V").rows, 3);
  EXPECT_EQ(p.block("V").cols, 4);
  EXPECT_EQ(p.block("Q").rows, 4);
  for (const char* n : {"Y_lower", "kappa_floor", "omega_floor", "trace_Q", "kappa_norm", "omega_norm"})
    EXPECT_NO_THROW(p.constraint(n)) << n;
}

TEST(BuildLmi, H2BlockSizes) {
  const auto p = build_h2_lmi(f16::model().weighted(), f16_spec(NormKind::h2));
  EXPECT_EQ(p.constraint("performance").expr.rows(), 11);
  EXPECT_EQ(p.constraint("h2_gram").expr.rows(), 9);
  EXPECT_EQ(p.constraint("dc_gain").expr.rows(), 7);
  EXPECT_EQ(p.block("Q1").rows, 2);
  EXPECT_EQ(p.block("Q2").rows, 4);
  EXPECT_NO_THROW(p.constraint("trace_Q1"));
  EXPECT_NO_THROW(p.constraint("trace_Q2"));
}

TEST(BuildLmi, PreconditionsAreEnforced) {
  StateSpace s = f16::model().weighted();
  s.A(0, 0) = 1.0;
  EXPECT_THROW(build_lmi(s, f16_spec(NormKind::hinf)), PreconditionViolation);
  s = f16::model().weighted();
  s.Dd(0, 0) = 0.1;
  EXPECT_THROW(build_lmi(s, f16_spec(NormKind::h2)), InvalidInput);
  s = f16::model().weighted();
  EXPECT_THROW(build_lmi(s, f16_spec(NormKind::hinf, -1.0)), InvalidInput);
}

TEST(RecoverGain, ToyExample) {
  MatrixXd V(2, 2), K(2, 2);
  V << 2, 4, 8, 12;
  K << 1, 2, 2, 3;
  EXPECT_TRUE(recover_gain(Eigen::Vector2d(2, 4), V).isApprox(K, 1e-15));
  EXPECT_THROW(recover_gain(Eigen::Vector2d(0, 4), V), InvalidDegradation);
}

TEST(F16Synthesis, HinfCertificate) {
  const auto& r = f16_result(NormKind::hinf);
  ASSERT_EQ(r.status, SynthesisStatus::optimal) << r.solver.message;
  ASSERT_TRUE(r.verification.has_value());
  EXPECT_EQ(r.verification->kind, NormKind::hinf);
  EXPECT_LE(r.verification->value, 0.5 * (1 + 1e-4));
  EXPECT_LT(r.solver.seconds, 30.0);
  const auto v = validate(r, f16::model().weighted(), f16_spec(NormKind::hinf));
  for (const auto& c : v.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.value << " vs " << c.limit;
  EXPECT_TRUE(v.passed());
}

TEST(F16Synthesis, H2Certificate) {
  const auto& r = f16_result(NormKind::h2);
  ASSERT_EQ(r.status, SynthesisStatus::optimal) << r.solver.message;
  ASSERT_TRUE(r.verification.has_value());
  const double n = r.verification->value;
  EXPECT_LE(n * n, 0.5 * (1 + 1e-4));
  const auto v = validate(r, f16::model().weighted(), f16_spec(NormKind::h2));
  for (const auto& c : v.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.value << " vs " << c.limit;
  ASSERT_NE(find(v, "h2_norm_squared"), nullptr);
}

TEST(F16Synthesis, TrendsAcrossNorms) {
  const auto& hi = f16_result(NormKind::hinf);
  const auto& h2 = f16_result(NormKind::h2);
  ASSERT_EQ(hi.status, SynthesisStatus::optimal);
  ASSERT_EQ(h2.status, SynthesisStatus::optimal);
  for (const auto* r : {&hi, &h2}) {
    // Elevator needs the widest bandwidth, thrust the narrowest.
    EXPECT_GE(r->deg.omega_c(1), r->deg.omega_c(2));
    EXPECT_GE(r->deg.omega_c(2), r->deg.omega_c(0));
  }
  for (int i = 0; i < 3; ++i)
    EXPECT_LE(1 / std::sqrt(hi.deg.kappa_a(i)), 1 / std::sqrt(h2.deg.kappa_a(i))) << "actuator " << i;
}

TEST(F16Synthesis, TinyGammaIsInfeasible) {
  for (auto kind : {NormKind::hinf}) {
    const auto r = synthesize(f16::model().weighted(), f16_spec(kind, 1e-9));
    EXPECT_EQ(r.status, SynthesisStatus::infeasible) << r.solver.conic_status << " " << r.solver.message;
    EXPECT_FALSE(validate(r, f16::model().weighted(), f16_spec(kind, 1e-9)).passed());
  }
}

TEST(F16Synthesis, TamperedGainFailsValidation) {
  SynthesisResult r = f16_result(NormKind::hinf);
  ASSERT_EQ(r.status, SynthesisStatus::optimal);
  r.K.array() += 10.0;
  const auto v = validate(r, f16::model().weighted(), f16_spec(NormKind::hinf));
  EXPECT_FALSE(v.passed());
  EXPECT_FALSE(find(v, "recovery_identity")->passed);
}

TEST(F16Synthesis, LargerGammaNeverCostsMore) {
  const auto& base = f16_result(NormKind::hinf);
  const auto r = synthesize(f16::model().weighted(), f16_spec(NormKind::hinf, 1.0));
  ASSERT_EQ(r.status, SynthesisStatus::optimal);
  EXPECT_LE(r.objective, base.objective * (1 + 1e-6));
  EXPECT_TRUE(validate(r, f16::model().weighted(), f16_spec(NormKind::hinf, 1.0)).passed());
}

TEST(F16Synthesis, H2NormConvention) {
  SynthesisSpec s = f16_spec(NormKind::h2);
  s.h2_convention = H2BoundConvention::norm;
  EXPECT_DOUBLE_EQ(s.h2_trace_bound(), 0.25);
  const auto r = synthesize(f16::model().weighted(), s);
  ASSERT_EQ(r.status, SynthesisStatus::optimal) << r.solver.message;
  EXPECT_LE(r.verification->value, 0.5 * (1 + 1e-4));
  const auto v = validate(r, f16::model().weighted(), s);
  EXPECT_TRUE(v.passed());
  EXPECT_NE(find(v, "h2_norm"), nullptr);
}

TEST(RandomPlants, CertificatesHold) {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> nx(2, 4), nu(1, 2), nz(1, 2);
  for (int trial = 0; trial < 6; ++trial) {
    const StateSpace s = random_plant(rng, nx(rng), nu(rng), nz(rng));
    for (auto kind : {NormKind::hinf, NormKind::h2}) {
      SynthesisSpec spec;
      spec.norm_kind = kind;
      // K = 0 with large kappa_a is feasible whenever gamma exceeds the open-loop disturbance norm.
      if (kind == NormKind::hinf) {
        spec.gamma = 2 * hinf_norm(s.A, s.Bd, s.Cz).value;
      } else {
        const double n = h2_norm(s.A, s.Bd, s.Cz).value;
        spec.gamma = 2 * n * n;
      }
      const auto r = synthesize(s, spec);
      ASSERT_EQ(r.status, SynthesisStatus::optimal) << "trial " << trial << " " << to_string(kind) << " "
                                                    << r.solver.message;
      const auto v = validate(r, s, spec);
      for (const auto& c : v.checks)
        EXPECT_TRUE(c.passed) << "trial " << trial << " " << to_string(kind) << " " << c.name << " " << c.value
                              << " vs " << c.limit;
    }
  }
}

TEST(SynthesisSpec, Checks) {
  const StateSpace s = f16::model().weighted();
  SynthesisSpec spec = f16_spec(NormKind::hinf);
  EXPECT_NO_THROW(spec.check(s));
  spec.lambda_a = spec.lambda_wc = spec.lambda_xF = 0;
  EXPECT_THROW(spec.check(s), InvalidInput);
  spec = f16_spec(NormKind::hinf);
  spec.Wd = Eigen::Vector2d(1, 1);
  EXPECT_THROW(spec.check(s), InvalidInput);
  spec = f16_spec(NormKind::hinf);
  EXPECT_NEAR(spec.eps_for(s), 1e-8 * (1 + s.A.norm()), 1e-20);
}
