#include <gtest/gtest.h>

#include <cmath>

#include "actdeg/conic.hpp"
#include "actdeg/interior_point.hpp"

using namespace actdeg;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ConicSolution run(const ConicProblem& p) {
  InteriorPointSolver<> s;
  return s.solve(p, ConicSettings{});
}

}  // namespace

TEST(Svec, RoundTripPreservesInnerProduct) {
  MatrixXd X(3, 3), Y(3, 3);
  X << 1, 2, 3, 2, 5, 6, 3, 6, 9;
  Y << 4, -1, 0.5, -1, 2, 7, 0.5, 7, -3;
  EXPECT_NEAR(svec::pack(X).dot(svec::pack(Y)), (X * Y).trace(), 1e-12);
  EXPECT_TRUE(svec::unpack(svec::pack(X), 3).isApprox(X, 1e-15));
}

TEST(InteriorPoint, SmallLp) {
  // min -x1 - x2  s.t.  x1 + 2 x2 <= 4, 3 x1 + x2 <= 6, x >= 0.
  ConicProblem p;
  p.c = Eigen::Vector2d(-1, -1);
  p.A.resize(4, 2);
  p.A << 1, 2, 3, 1, -1, 0, 0, -1;
  p.b = Eigen::Vector4d(4, 6, 0, 0);
  p.cones = {{ConeKind::nonnegative, 4}};
  const auto r = run(p);
  ASSERT_EQ(r.status, ConicStatus::optimal) << r.message;
  EXPECT_NEAR(r.primal_objective, -2.8, 1e-8);
  EXPECT_NEAR(r.x(0), 1.6, 1e-7);
  EXPECT_NEAR(r.x(1), 1.2, 1e-7);
}

TEST(InteriorPoint, LargestEigenvalueSdp) {
  // min t  s.t.  t I - M >= 0.
  MatrixXd M(2, 2);
  M << 2, 1, 1, 3;
  ConicProblem p;
  p.c = VectorXd::Ones(1);
  p.A = -svec::pack(MatrixXd(MatrixXd::Identity(2, 2)));
  p.b = -svec::pack(M);
  p.cones = {{ConeKind::psd, 2}};
  const auto r = run(p);
  ASSERT_EQ(r.status, ConicStatus::optimal) << r.message;
  EXPECT_NEAR(r.x(0), (5 + std::sqrt(5.0)) / 2, 1e-8);
}

TEST(InteriorPoint, SecondOrderCone) {
  // min x1 + x2  s.t.  ||(x1, x2)|| <= 1.5.
  ConicProblem p;
  p.c = Eigen::Vector2d(1, 1);
  p.A.resize(3, 2);
  p.A << 0, 0, -1, 0, 0, -1;
  p.b = Eigen::Vector3d(1.5, 0, 0);
  p.cones = {{ConeKind::second_order, 3}};
  const auto r = run(p);
  ASSERT_EQ(r.status, ConicStatus::optimal) << r.message;
  EXPECT_NEAR(r.primal_objective, -1.5 * std::sqrt(2.0), 1e-8);
}

TEST(InteriorPoint, MixedCones) {
  // min t + x  s.t.  x >= 1, [[t, x], [x, 1]] >= 0  (t >= x^2).
  ConicProblem p;
  p.c = Eigen::Vector2d(1, 1);  // vars (t, x)
  p.A = MatrixXd::Zero(4, 2);
  p.b = VectorXd::Zero(4);
  p.A(0, 1) = -1;
  p.b(0) = -1;
  // svec of [[t, x], [x, 1]] = (t, sqrt2 x, 1)
  p.A(1, 0) = -1;
  p.A(2, 1) = -std::sqrt(2.0);
  p.b(3) = 1;
  p.cones = {{ConeKind::nonnegative, 1}, {ConeKind::psd, 2}};
  const auto r = run(p);
  ASSERT_EQ(r.status, ConicStatus::optimal) << r.message;
  EXPECT_NEAR(r.primal_objective, 2.0, 1e-7);
}

TEST(InteriorPoint, DetectsPrimalInfeasibility) {
  // x >= 1 and x <= 0.
  ConicProblem p;
  p.c = VectorXd::Ones(1);
  p.A.resize(2, 1);
  p.A << -1, 1;
  p.b = Eigen::Vector2d(-1, 0);
  p.cones = {{ConeKind::nonnegative, 2}};
  const auto r = run(p);
  EXPECT_EQ(r.status, ConicStatus::primal_infeasible);
  EXPECT_LE(r.certificate_residual, 1e-8);
}

TEST(InteriorPoint, DetectsUnboundedness) {
  // min -x  s.t.  x >= 0.
  ConicProblem p;
  p.c = -VectorXd::Ones(1);
  p.A = -MatrixXd::Ones(1, 1);
  p.b = VectorXd::Zero(1);
  p.cones = {{ConeKind::nonnegative, 1}};
  EXPECT_EQ(run(p).status, ConicStatus::dual_infeasible);
}

TEST(InteriorPoint, RejectsInconsistentData) {
  ConicProblem p;
  p.c = VectorXd::Ones(1);
  p.A = MatrixXd::Ones(2, 1);
  p.b = VectorXd::Zero(2);
  p.cones = {{ConeKind::nonnegative, 3}};
  InteriorPointSolver<> s;
  EXPECT_THROW(s.solve(p, ConicSettings{}), InvalidInput);
}
