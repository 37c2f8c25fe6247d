#include <gtest/gtest.h>

#include "actdeg/interior_point.hpp"
#include "actdeg/lmi.hpp"

using namespace actdeg;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(LmiProblem, AssignValueRoundTrip) {
  LmiProblem p;
  p.add_symmetric("S", 3);
  p.add_matrix("M", 2, 3);
  p.add_vector("v", 4);
  p.add_scalar("g");
  EXPECT_EQ(p.num_variables(), 6 + 6 + 4 + 1);
  MatrixXd S(3, 3), M(2, 3);
  S << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  M << 1, 2, 3, 4, 5, 6;
  VectorXd x = VectorXd::Zero(p.num_variables());
  p.assign("S", S, x);
  p.assign("M", M, x);
  p.assign("v", Eigen::Vector4d(7, 8, 9, 10), x);
  p.assign("g", MatrixXd::Constant(1, 1, -2), x);
  EXPECT_EQ(p.value("S", x), S);
  EXPECT_EQ(p.value("M", x), M);
  EXPECT_EQ(MatrixXd(p.value("v", x)), MatrixXd(Eigen::Vector4d(7, 8, 9, 10)));
  EXPECT_EQ(p.value("g", x)(0, 0), -2);
}

TEST(LmiProblem, RejectsAsymmetricMatrixInequality) {
  LmiProblem p;
  p.add_matrix("M", 2, 2);
  EXPECT_THROW(p.add_psd("bad", p.var("M")), InvalidInput);
  EXPECT_NO_THROW(p.add_psd("ok", p.var("M") + p.var("M").transpose()));
}

TEST(LmiProblem, RejectsDuplicateAndUnknownNames) {
  LmiProblem p;
  p.add_scalar("a");
  EXPECT_THROW(p.add_scalar("a"), InvalidInput);
  EXPECT_THROW(p.var("b"), InvalidInput);
  EXPECT_THROW(p.constraint("c"), InvalidInput);
}

TEST(LmiProblem, DumpListsBlocksAndConstraints) {
  LmiProblem p;
  p.add_symmetric("P", 2);
  p.add_scalar("t");
  p.add_nsd("lyap", -p.var("P"));
  p.add_nonnegative("t_pos", p.var("t"));
  p.set_objective(p.var("t"));
  const std::string d = p.dump();
  for (const char* s : {"block P symmetric 2x2", "block t scalar 1x1", "constraint lyap nsd 2x2",
                        "constraint t_pos nonnegative 1x1", "variables 4"})
    EXPECT_NE(d.find(s), std::string::npos) << s;
}

TEST(LmiProblem, LoweringSolvesAMinimalLmi) {
  // min t  s.t.  P >= I,  P_11 <= 4,  [[t, 1], [1, P_11]] >= 0.  Optimum t = 1/4.
  LmiProblem p;
  p.add_symmetric("P", 2);
  p.add_scalar("t");
  const AffineExpr P = p.var("P");
  p.add_psd("P_lower", P + AffineExpr::constant(-MatrixXd::Identity(2, 2)));
  MatrixXd e1 = MatrixXd::Zero(1, 2);
  e1(0, 0) = 1;
  const AffineExpr p11 = e1 * P * e1.transpose();
  p.add_nonnegative("P11_upper", AffineExpr::constant(MatrixXd::Constant(1, 1, 4.0)) - p11);
  p.add_psd("schur", AffineExpr::blocks({{p.var("t"), AffineExpr::constant(MatrixXd::Ones(1, 1))},
                                         {AffineExpr::constant(MatrixXd::Ones(1, 1)), p11}}));
  p.set_objective(p.var("t"));
  const ConicProblem c = p.to_conic();
  EXPECT_NO_THROW(c.check());
  InteriorPointSolver<> s;
  const auto r = s.solve(c, ConicSettings{});
  ASSERT_EQ(r.status, ConicStatus::optimal) << r.message;
  EXPECT_NEAR(p.value("t", r.x)(0, 0), 0.25, 1e-7);
  EXPECT_NEAR(p.value("P", r.x)(0, 0), 4.0, 1e-6);
}
