#include "glde/piecewise_poly.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>

using Eigen::MatrixXd;
using glde::PiecewisePoly;
using glde::shift_poly_coeffs;

namespace {

MatrixXd random_mat(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd M(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) M(r, c) = u(rng);
  return M;
}

MatrixXd eval_poly(const std::vector<MatrixXd>& c, double u) {
  MatrixXd acc = c.back();
  for (auto it = c.rbegin() + 1; it != c.rend(); ++it) acc = *it + u * acc;
  return acc;
}

}  // namespace

TEST(ShiftPolyCoeffs, MatchesDirectEvaluation) {
  std::mt19937 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<MatrixXd> c;
    for (int k = 0; k <= 5; ++k) c.push_back(random_mat(rng, 2));
    double d = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    auto shifted = shift_poly_coeffs(c, d);
    ASSERT_EQ(shifted.size(), c.size());
    for (int i = 0; i < 7; ++i) {
      double u = -1.5 + 0.5 * i;
      EXPECT_LT((eval_poly(shifted, u) - eval_poly(c, u + d)).norm(), 1e-12);
    }
  }
}

TEST(PiecewisePoly, EvalAndExactIntegral) {
  // one cell on [0, 2]: p(u) = 1 + 3u + 2u^2 (scalar as 1x1)
  auto m = [](double v) { return MatrixXd::Constant(1, 1, v); };
  PiecewisePoly<MatrixXd> p({0.0, 2.0}, {{m(1.0), m(3.0), m(2.0)}});
  EXPECT_NEAR(p.evalAt(0.5)(0, 0), 1.0 + 1.5 + 0.5, 1e-15);
  // integral over [0.5, 1.5]: u + 3u^2/2 + 2u^3/3
  auto F = [](double u) { return u + 1.5 * u * u + 2.0 * u * u * u / 3.0; };
  EXPECT_NEAR(p.integrate(0.5, 1.5)(0, 0), F(1.5) - F(0.5), 1e-14);
}

TEST(PiecewisePoly, IntegralAdditivityAndReversal) {
  std::mt19937 rng(12);
  std::vector<std::vector<MatrixXd>> cells;
  for (int j = 0; j < 3; ++j) {
    std::vector<MatrixXd> c;
    for (int k = 0; k <= 3; ++k) c.push_back(random_mat(rng, 2));
    cells.push_back(c);
  }
  PiecewisePoly<MatrixXd> p({0.0, 0.4, 0.7, 1.0}, cells);
  for (double a : {0.1, 0.35, 0.9}) {
    for (double b : {0.2, 0.55, 1.0}) {
      double r = 0.65;
      MatrixXd lhs = p.integrate(a, b);
      MatrixXd rhs = p.integrate(a, r) + p.integrate(r, b);
      EXPECT_LT((lhs - rhs).norm(), 1e-13);
      EXPECT_LT((p.integrate(b, a) + lhs).norm(), 1e-15);
    }
  }
  EXPECT_EQ(p.integrate(0.3, 0.3).norm(), 0.0);
}

TEST(PiecewisePoly, CellOwnership) {
  auto m = [](double v) { return MatrixXd::Constant(1, 1, v); };
  PiecewisePoly<MatrixXd> p({0.0, 0.5, 1.0}, {{m(1.0)}, {m(2.0)}});
  EXPECT_EQ(p.cellIndexAt(0.0), 0u);
  EXPECT_EQ(p.cellIndexAt(0.5), 1u);  // breakpoints belong to the right cell
  EXPECT_EQ(p.cellIndexAt(1.0), 1u);  // except the domain end
  EXPECT_EQ(p.evalAt(0.5)(0, 0), 2.0);
}

TEST(PiecewisePoly, InsertBreakpointPreservesValues) {
  std::mt19937 rng(13);
  std::vector<std::vector<MatrixXd>> cells;
  for (int j = 0; j < 2; ++j) {
    std::vector<MatrixXd> c;
    for (int k = 0; k <= 4; ++k) c.push_back(random_mat(rng, 2));
    cells.push_back(c);
  }
  PiecewisePoly<MatrixXd> p({0.0, 0.6, 1.0}, cells);
  PiecewisePoly<MatrixXd> q = p;
  q.insertBreakpoint(0.37, 1e-10);
  q.insertBreakpoint(0.6, 1e-10);  // exact hit: no-op
  q.insertBreakpoint(0.8, 1e-10);
  EXPECT_EQ(q.cellCount(), 4u);
  for (int i = 0; i <= 40; ++i) {
    double t = i / 40.0;
    EXPECT_LT((p.evalAt(t) - q.evalAt(t)).norm(), 1e-12) << "t=" << t;
  }
  EXPECT_LT((p.integrate(0.1, 0.95) - q.integrate(0.1, 0.95)).norm(), 1e-13);
}

TEST(PiecewisePoly, ValidatesInput) {
  auto m = [](double v) { return MatrixXd::Constant(1, 1, v); };
  EXPECT_THROW(PiecewisePoly<MatrixXd>({0.0, 0.0}, {{m(1.0)}}), std::invalid_argument);
  EXPECT_THROW(PiecewisePoly<MatrixXd>({0.0, 1.0, 0.5}, {{m(1.0)}, {m(1.0)}}),
               std::invalid_argument);
  EXPECT_THROW(PiecewisePoly<MatrixXd>({0.0, 1.0}, {{m(1.0)}, {m(1.0)}}), std::invalid_argument);
  // degree above the cap
  std::vector<MatrixXd> tooLong(7, m(1.0));
  EXPECT_THROW(PiecewisePoly<MatrixXd>({0.0, 1.0}, {tooLong}), std::invalid_argument);
  // inconsistent dimensions across cells
  EXPECT_THROW(PiecewisePoly<MatrixXd>({0.0, 0.5, 1.0}, {{m(1.0)}, {MatrixXd::Zero(2, 2)}}),
               std::invalid_argument);
}
