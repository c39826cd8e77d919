#include "glde/propagator.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "glde/testkit.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace glde;

namespace {

MatrixXd m11(double v) { return MatrixXd::Constant(1, 1, v); }

GLDESystem random_homogeneous(unsigned seed, int n) {
  std::mt19937 rng(seed);
  return testkit::random_system(rng, n, false, false);
}

}  // namespace

TEST(Propagator, ScalarDecayClosedForms) {
  GLDESystem sys = testkit::find_example("E1").system;
  Propagator prop(sys);
  EXPECT_NEAR(prop.transition(1.0, 0.0)(0, 0), std::exp(-1.0), 1e-13);
  EXPECT_NEAR(prop.transition(0.0, 1.0)(0, 0), std::exp(1.0), 1e-12);
  EXPECT_NEAR(prop.transition(3.25, 0.5)(0, 0), std::exp(-2.75), 1e-12);
  EXPECT_NEAR(prop.transition(-1.5, 0.25)(0, 0), std::exp(1.75), 1e-12);
  EXPECT_EQ(prop.transition(0.7, 0.7)(0, 0), 1.0);
}

TEST(Propagator, ImpulsiveClosedForms) {
  GLDESystem sys = testkit::find_example("E4c1").system;
  Propagator prop(sys);
  EXPECT_EQ(prop.monodromy()(0, 0), 2.0);
  // crossings at 0.5 and 1.5 double the state twice
  EXPECT_EQ(prop.transition(2.49, 0.0)(0, 0), 4.0);
  // the jump time itself carries the point value (jump not yet applied)
  EXPECT_EQ(prop.transition(0.5, 0.0)(0, 0), 1.0);
  EXPECT_EQ(prop.oneSidedTransition(0.5, 0.0, Side::TPlus)(0, 0), 2.0);
}

TEST(Propagator, CancellingImpulseGivesUnitMonodromy) {
  GLDESystem sys = testkit::find_example("E5").system;
  Propagator prop(sys);
  EXPECT_NEAR(prop.monodromy()(0, 0), 1.0, 1e-13);
}

TEST(Propagator, CocycleInverseIdentityRandom) {
  for (unsigned seed : {31u, 32u, 33u}) {
    GLDESystem sys = random_homogeneous(seed, 3);
    Propagator prop(sys);
    std::mt19937 rng(seed + 100);
    std::uniform_real_distribution<double> u(-1.5, 2.5);
    for (int i = 0; i < 20; ++i) {
      double t = u(rng), r = u(rng), s = u(rng);
      MatrixXd lhs = prop.transition(t, s);
      MatrixXd rhs = prop.transition(t, r) * prop.transition(r, s);
      EXPECT_LT((lhs - rhs).norm(), 1e-10);
      MatrixXd inv = prop.transition(t, s) * prop.transition(s, t);
      EXPECT_LT((inv - MatrixXd::Identity(3, 3)).norm(), 1e-10);
    }
  }
}

TEST(Propagator, OneSidedFactorIdentitiesAtJumps) {
  GLDESystem sys = random_homogeneous(34, 3);
  Propagator prop(sys);
  MatrixXd I = MatrixXd::Identity(3, 3);
  double s = 0.123;
  for (const auto& jp : sys.jumps()) {
    double tau = jp.time + (jp.time < s ? 1.0 : 0.0);  // keep tau > s
    MatrixXd U = prop.transition(tau, s);
    EXPECT_LT((prop.oneSidedTransition(tau, s, Side::TPlus) - (I + jp.postA) * U).norm(), 1e-12);
    EXPECT_LT((prop.oneSidedTransition(tau, s, Side::TMinus) - (I - jp.preA) * U).norm(), 1e-12);
    MatrixXd V = prop.transition(s + 1.0, tau);
    EXPECT_LT(
        (prop.oneSidedTransition(s + 1.0, tau, Side::SPlus) * (I + jp.postA) - V).norm(),
        1e-12);
    EXPECT_LT(
        (prop.oneSidedTransition(s + 1.0, tau, Side::SMinus) * (I - jp.preA) - V).norm(),
        1e-12);
  }
}

TEST(Propagator, OneSidedValuesAreActualLimits) {
  GLDESystem sys = random_homogeneous(35, 2);
  Propagator prop(sys);
  ASSERT_FALSE(sys.jumps().empty());
  double s = -0.4, d = 1e-6;
  for (const auto& jp : sys.jumps()) {
    double tau = jp.time;
    EXPECT_LT((prop.transition(tau + d, s) - prop.oneSidedTransition(tau, s, Side::TPlus)).norm(),
              1e-5);
    EXPECT_LT((prop.transition(tau - d, s) - prop.oneSidedTransition(tau, s, Side::TMinus)).norm(),
              1e-5);
    EXPECT_LT((prop.transition(s + 2.0, tau + d) -
               prop.oneSidedTransition(s + 2.0, tau, Side::SPlus))
                  .norm(),
              1e-5);
    EXPECT_LT((prop.transition(s + 2.0, tau - d) -
               prop.oneSidedTransition(s + 2.0, tau, Side::SMinus))
                  .norm(),
              1e-5);
  }
}

TEST(Propagate, MatchesIntegralEquationOracle) {
  GLDESystem sys = random_homogeneous(36, 3);
  VectorXd x0(3);
  x0 << 0.7, -0.4, 0.2;
  VectorXd walked = propagate(sys, 0.0, x0, 1.0).evaluate(1.0);
  VectorXd c12 = testkit::integral_equation_oracle(sys, 0.0, x0, 1.0, 1 << 12);
  VectorXd c13 = testkit::integral_equation_oracle(sys, 0.0, x0, 1.0, 1 << 13);
  double e12 = (c12 - walked).norm();
  double e13 = (c13 - walked).norm();
  EXPECT_LT(e13, 1e-4);
  // oracle converges to the walked value (first order at jump cells)
  EXPECT_LT(e13, e12 / 1.6);
}

TEST(Propagate, MatchesMidpointOracleWithoutJumps) {
  // single-cell densities keep the oracle's uniform grid away from interior
  // kinks, and the unit span puts the period seam exactly on a grid node
  std::mt19937 rng(37);
  BVMatrixFunction A = testkit::random_coefficient(rng, 3, 1.0, 1, 0);
  RegulatedVectorFunction f = testkit::random_forcing(rng, 3, 1.0, 1, 0, false);
  GLDESystem sys(std::move(A), std::move(f));
  VectorXd x0(3);
  x0 << 0.1, 0.9, -0.5;
  VectorXd walked = propagate(sys, 0.2, x0, 1.2).evaluate(1.2);
  VectorXd oracle = testkit::dense_ode_oracle(sys, 0.2, x0, 1.2, 200000);
  EXPECT_LT((walked - oracle).norm(), 1e-8);
}

TEST(Propagate, BackwardForwardRoundTrip) {
  GLDESystem sys = random_homogeneous(38, 3);
  VectorXd x0(3);
  x0 << 1.0, -2.0, 0.5;
  VectorXd fwd = propagate(sys, -0.3, x0, 1.7).evaluate(1.7);
  VectorXd back = propagate(sys, 1.7, fwd, -0.3).evaluate(-0.3);
  EXPECT_LT((back - x0).norm(), 1e-10);
}

TEST(Propagate, SolutionJumpRelations) {
  std::mt19937 rng(39);
  GLDESystem sys = testkit::random_system(rng, 3, true, false);
  VectorXd x0(3);
  x0 << 0.3, 0.3, -0.1;
  Trajectory traj = propagate(sys, 0.0, x0, 1.0);
  MatrixXd I = MatrixXd::Identity(3, 3);
  for (const auto& jp : sys.jumps()) {
    if (jp.time <= 0.0 || jp.time >= 1.0) continue;
    auto sided = traj.oneSided(jp.time);
    // x(tau) = (I - dA-)^{-1} (x(tau-) + df-) and x(tau+) = (I + dA+) x(tau) + df+
    VectorXd point = (I - jp.preA).lu().solve(sided.left + jp.preF);
    EXPECT_LT((sided.value - point).norm(), 1e-12);
    VectorXd right = (I + jp.postA) * sided.value + jp.postF;
    EXPECT_LT((sided.right - right).norm(), 1e-12);
  }
}

TEST(Propagate, TrajectorySampleSidesAtJump) {
  GLDESystem sys = testkit::find_example("E4c1").system;
  Trajectory traj = propagate(sys, 0.0, VectorXd::Ones(1), 1.0, 11);
  const auto& smp = traj.samples();
  ASSERT_GE(smp.size(), 13u);  // 11 uniform plus L and R at the jump
  bool sawL = false, sawP = false, sawR = false;
  for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
    EXPECT_LE(smp[i].t, smp[i + 1].t + 1e-15);
    if (std::abs(smp[i].t - 0.5) < 1e-12) {
      if (smp[i].side == 'L') {
        sawL = true;
        EXPECT_EQ(smp[i].x(0), 1.0);
      }
      if (smp[i].side == 'P') {
        sawP = true;
        EXPECT_EQ(smp[i].x(0), 1.0);
      }
      if (smp[i].side == 'R') {
        sawR = true;
        EXPECT_EQ(smp[i].x(0), 2.0);
      }
    }
  }
  EXPECT_TRUE(sawL && sawP && sawR);
  EXPECT_EQ(smp.front().side, 'P');
  EXPECT_EQ(smp.back().side, 'P');
}

TEST(Propagate, VariationOfConstantsCrosscheck) {
  for (unsigned seed : {41u, 42u, 43u, 44u, 45u}) {
    std::mt19937 rng(seed);
    GLDESystem sys = testkit::random_system(rng, 3, true, false);
    VectorXd x0(3);
    x0 << 0.2, -0.6, 1.1;
    VocResult res = voc_crosscheck(sys, 0.15, x0, 1.85);
    EXPECT_TRUE(res.pass) << "seed " << seed << " residual " << res.residual;
    EXPECT_LT(res.residual, 1e-6);
  }
}

TEST(Propagate, AdjointPathMatchesTransitions) {
  GLDESystem sys = random_homogeneous(46, 2);
  Propagator prop(sys);
  MatrixPath path = adjoint_path(sys, 1.2, 0.1);
  for (double s : {0.1, 0.33, 0.77, 1.19}) {
    EXPECT_LT((path.evaluate(s) - prop.transition(1.2, s)).norm(), 1e-9) << "s=" << s;
  }
}

TEST(GLDESystem, ConditionHViolationRejected) {
  // I + dA+ singular at the jump
  PiecewisePoly<MatrixXd> dens({0.0, 1.0}, {{m11(0.0)}});
  BVMatrixFunction A(std::move(dens), {MatrixJump{0.5, m11(0.0), m11(-1.0)}});
  HCheckReport rep = check_H(A);
  EXPECT_FALSE(rep.pass);
  ASSERT_EQ(rep.entries.size(), 1u);
  EXPECT_EQ(rep.entries[0].detPost, 0.0);
  EXPECT_THROW(GLDESystem{std::move(A)}, h_violation_error);
}

TEST(GLDESystem, DimensionMismatchRejected) {
  PiecewisePoly<MatrixXd> dens({0.0, 1.0}, {{MatrixXd::Zero(2, 2)}});
  BVMatrixFunction A(std::move(dens), {});
  RegulatedVectorFunction f(PiecewisePoly<VectorXd>({0.0, 1.0}, {{VectorXd::Zero(3)}}), {});
  EXPECT_THROW(GLDESystem(std::move(A), std::move(f)), config_error);
}
