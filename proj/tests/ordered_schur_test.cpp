#include "glde/ordered_schur.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>

using Eigen::MatrixXd;
using namespace glde;

namespace {

MatrixXd random_mat(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd M(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) M(r, c) = u(rng);
  return M;
}

// random well-conditioned similarity of a block-diagonal seed
MatrixXd conjugate(std::mt19937& rng, const MatrixXd& D) {
  int n = static_cast<int>(D.rows());
  MatrixXd S = MatrixXd::Identity(n, n) + 0.4 * random_mat(rng, n);
  return S * D * S.inverse();
}

MatrixXd rotation_block(double modulus, double angle) {
  MatrixXd R(2, 2);
  R << std::cos(angle), std::sin(angle), -std::sin(angle), std::cos(angle);
  return modulus * R;
}

bool is_quasi_triangular(const MatrixXd& T) {
  int n = static_cast<int>(T.rows());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < r - 1; ++c)
      if (std::abs(T(r, c)) > 1e-11) return false;
  // no two consecutive nonzero subdiagonal entries
  for (int i = 0; i + 2 < n; ++i)
    if (std::abs(T(i + 1, i)) > 1e-11 && std::abs(T(i + 2, i + 1)) > 1e-11) return false;
  return true;
}

}  // namespace

TEST(Sylvester, SolvesSmallSystems) {
  std::mt19937 rng(51);
  MatrixXd A = random_mat(rng, 3) + 4.0 * MatrixXd::Identity(3, 3);
  MatrixXd B = random_mat(rng, 2) - 4.0 * MatrixXd::Identity(2, 2);
  MatrixXd C = random_mat(rng, 3).leftCols(2);
  MatrixXd X = detail::solve_sylvester(A, B, C);
  EXPECT_LT((A * X - X * B - C).norm(), 1e-11);
}

TEST(OrderedSchur, FactorizationIsValid) {
  std::mt19937 rng(52);
  for (int rep = 0; rep < 8; ++rep) {
    MatrixXd M = random_mat(rng, 4);
    OrderedSchur os = ordered_schur_unit_disk(M);
    EXPECT_LT((os.Z.transpose() * os.Z - MatrixXd::Identity(4, 4)).norm(), 1e-12);
    EXPECT_LT((os.Z * os.T * os.Z.transpose() - M).norm(), 1e-11);
    EXPECT_TRUE(is_quasi_triangular(os.T));
  }
}

TEST(OrderedSchur, StableBlockLeads) {
  std::mt19937 rng(53);
  // mix of real and complex-pair eigenvalues inside and outside the disk
  MatrixXd D = MatrixXd::Zero(4, 4);
  D(0, 0) = 2.0;
  D(1, 1) = 0.3;
  D.block(2, 2, 2, 2) = rotation_block(1.7, 0.9);
  MatrixXd M = conjugate(rng, D);
  OrderedSchur os = ordered_schur_unit_disk(M);
  EXPECT_EQ(os.stableCount, 1);
  // leading 1x1 block must be the 0.3 eigenvalue
  EXPECT_NEAR(os.T(0, 0), 0.3, 1e-9);
  EXPECT_LT((os.Z * os.T * os.Z.transpose() - M).norm(), 1e-10);

  D = MatrixXd::Zero(4, 4);
  D.block(0, 0, 2, 2) = rotation_block(3.0, 0.5);
  D.block(2, 2, 2, 2) = rotation_block(0.4, 1.1);
  M = conjugate(rng, D);
  os = ordered_schur_unit_disk(M);
  EXPECT_EQ(os.stableCount, 2);
  EXPECT_NEAR(detail::block_modulus(os.T, 0, 2), 0.4, 1e-9);
}

TEST(SpectralProjection, SplitsEigenvectorsByModulus) {
  std::mt19937 rng(54);
  for (int rep = 0; rep < 6; ++rep) {
    MatrixXd D = MatrixXd::Zero(4, 4);
    D(0, 0) = -1.8;
    D(1, 1) = 0.55;
    D.block(2, 2, 2, 2) = rotation_block(rep % 2 ? 0.25 : 2.5, 0.7);
    MatrixXd M = conjugate(rng, D);
    SpectralSplit sp = spectral_projection_unit_disk(M);
    int expectStable = rep % 2 ? 3 : 1;
    EXPECT_EQ(sp.stableCount, expectStable);
    EXPECT_LT((sp.P * sp.P - sp.P).norm(), 1e-9);
    EXPECT_LT((sp.P * M - M * sp.P).norm(), 1e-9);
    // stable eigenvectors are fixed by P, unstable ones are annihilated
    Eigen::EigenSolver<MatrixXd> es(M);
    Eigen::MatrixXcd Pc = sp.P.cast<std::complex<double>>();
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXcd v = es.eigenvectors().col(i);
      double mod = std::abs(es.eigenvalues()(i));
      if (mod < 1.0)
        EXPECT_LT((Pc * v - v).norm(), 1e-8);
      else
        EXPECT_LT((Pc * v).norm(), 1e-8);
    }
  }
}

TEST(SpectralProjection, AllStableAndAllUnstable) {
  std::mt19937 rng(55);
  MatrixXd M = conjugate(rng, 0.5 * MatrixXd::Identity(3, 3));
  SpectralSplit sp = spectral_projection_unit_disk(M);
  EXPECT_EQ(sp.stableCount, 3);
  EXPECT_LT((sp.P - MatrixXd::Identity(3, 3)).norm(), 1e-12);

  M = conjugate(rng, 5.0 * MatrixXd::Identity(3, 3));
  sp = spectral_projection_unit_disk(M);
  EXPECT_EQ(sp.stableCount, 0);
  EXPECT_LT(sp.P.norm(), 1e-12);
}
