#include "glde/testkit.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "glde/config_json.hpp"
#include "glde/periodic.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace glde;

TEST(Examples, MonodromyMatchesClosedForms) {
  for (const auto& ex : testkit::builtin_examples()) {
    Propagator prop(ex.system);
    EXPECT_LT((prop.monodromy() - ex.monodromy).norm(), 1e-12) << ex.id;
    MonodromyData md = monodromy(prop);
    ASSERT_EQ(md.multipliers.size(), ex.multipliers.size()) << ex.id;
    for (std::size_t i = 0; i < md.multipliers.size(); ++i)
      EXPECT_LT(std::abs(md.multipliers[i] - ex.multipliers[i]), 1e-12) << ex.id;
  }
}

TEST(Examples, DefaultClassificationMatches) {
  for (const auto& ex : testkit::builtin_examples()) {
    DichotomyReport rep = analyze_dichotomy(Propagator(ex.system));
    EXPECT_EQ(rep.classification, ex.expectedDefault) << ex.id;
  }
}

TEST(Examples, StoredPeriodicStartIsConsistent) {
  auto ex = testkit::find_example("E6");
  Propagator prop(ex.system);
  EXPECT_LT((periodic_initial_condition(prop) - *ex.periodicX0).norm(), 1e-9);
}

TEST(Examples, FindByIdThrowsOnUnknown) {
  EXPECT_NO_THROW(testkit::find_example("E4cm05"));
  EXPECT_THROW(testkit::find_example("nope"), std::invalid_argument);
}

TEST(DenseOdeOracle, SecondOrderConvergence) {
  GLDESystem sys = testkit::find_example("E2").system;
  VectorXd x0 = VectorXd::Ones(1);
  double e1 = std::abs(testkit::dense_ode_oracle(sys, 0.0, x0, 1.0, 1024)(0) - std::exp(1.0));
  double e2 = std::abs(testkit::dense_ode_oracle(sys, 0.0, x0, 1.0, 2048)(0) - std::exp(1.0));
  EXPECT_GT(e1 / e2, 3.2);
  EXPECT_LT(e1 / e2, 4.8);
}

TEST(DenseOdeOracle, RejectsJumps) {
  GLDESystem sys = testkit::find_example("E4c1").system;
  EXPECT_THROW(testkit::dense_ode_oracle(sys, 0.0, VectorXd::Ones(1), 1.0, 100),
               std::invalid_argument);
}

TEST(IntegralEquationOracle, ConvergesToWalkedSolution) {
  auto ex = testkit::find_example("E6");
  VectorXd x0 = VectorXd::Constant(1, 0.3);
  VectorXd walked = propagate(ex.system, 0.0, x0, 1.0).evaluate(1.0);
  double e11 = (testkit::integral_equation_oracle(ex.system, 0.0, x0, 1.0, 1 << 11) - walked).norm();
  double e12 = (testkit::integral_equation_oracle(ex.system, 0.0, x0, 1.0, 1 << 12) - walked).norm();
  EXPECT_LT(e12, 2e-4);
  EXPECT_GT(e11 / e12, 1.6);  // first order at the jump cell
  EXPECT_LT(e11 / e12, 2.6);
}

TEST(SineDensity, FitsWithinTolerance) {
  VectorXd amps(2);
  amps << 1.0, -0.5;
  double freq = 2.0 * std::numbers::pi, phase = 0.3;
  auto dens = testkit::sine_vector_density(amps, freq, phase, 1.0);
  double worst = 0.0;
  for (int i = 0; i <= 997; ++i) {
    double t = i / 997.0;
    worst = std::max(worst, (dens.evalAt(t) - amps * std::sin(freq * t + phase)).norm());
  }
  EXPECT_LT(worst, 5e-9);
}

TEST(Generators, DeterministicFromSeed) {
  std::mt19937 a(123), b(123);
  GLDESystem s1 = testkit::random_system(a, 3, true, true);
  GLDESystem s2 = testkit::random_system(b, 3, true, true);
  EXPECT_EQ(canonical_dump(config_json(s1)), canonical_dump(config_json(s2)));
}

TEST(Generators, ProduceValidSystems) {
  for (unsigned seed = 200; seed < 220; ++seed) {
    std::mt19937 rng(seed);
    int n = 1 + static_cast<int>(seed % 4);
    GLDESystem sys = testkit::random_system(rng, n, seed % 2 == 0, seed % 4 == 0);
    EXPECT_TRUE(sys.hReport().pass);
    EXPECT_GT(sys.hReport().minAbsDet, 0.1);
    if (seed % 4 == 0) EXPECT_TRUE(sys.f().zeroIncrement(1e-12));
  }
}

TEST(Generators, JumpTimesSitOnBreakpoints) {
  std::mt19937 rng(321);
  BVMatrixFunction A = testkit::random_coefficient(rng, 2, 1.0, 4, 3);
  EXPECT_EQ(A.jumps().size(), 3u);
  const auto& bp = A.density().breakpoints();
  for (const auto& ev : A.jumps()) {
    bool onBreak = false;
    for (double b : bp)
      if (b == ev.time) onBreak = true;
    EXPECT_TRUE(onBreak) << ev.time;
  }
}
