#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace glde {

// Real Schur form M = Z T Z^T with every eigenvalue inside the open unit
// disk moved to the leading block of T.
struct OrderedSchur {
  Eigen::MatrixXd T, Z;
  int stableCount = 0;
};

namespace detail {

// Solves A X - X B = C by the Kronecker-product normal equations; sizes stay
// tiny (state dimension <= a handful), so dense LU is plenty.
inline Eigen::MatrixXd solve_sylvester(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                       const Eigen::MatrixXd& C) {
  Eigen::Index p = A.rows(), q = B.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(p * q, p * q);
  for (Eigen::Index j = 0; j < q; ++j)
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index m = 0; m < p; ++m) K(j * p + i, j * p + m) += A(i, m);
      for (Eigen::Index l = 0; l < q; ++l) K(j * p + i, l * p + i) -= B(l, j);
    }
  Eigen::VectorXd rhs(p * q);
  for (Eigen::Index j = 0; j < q; ++j) rhs.segment(j * p, p) = C.col(j);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  Eigen::VectorXd x = lu.solve(rhs);
  Eigen::MatrixXd X(p, q);
  for (Eigen::Index j = 0; j < q; ++j) X.col(j) = x.segment(j * p, p);
  return X;
}

// Diagonal block layout of a real quasi-triangular matrix.
inline std::vector<std::pair<int, int>> schur_blocks(const Eigen::MatrixXd& T) {
  std::vector<std::pair<int, int>> blocks;
  int n = static_cast<int>(T.rows());
  int i = 0;
  while (i < n) {
    double sub = (i + 1 < n) ? std::abs(T(i + 1, i)) : 0.0;
    double scale = std::abs(T(i, i)) + (i + 1 < n ? std::abs(T(i + 1, i + 1)) : 0.0);
    int sz = (sub > 1e-14 * (scale + 1.0)) ? 2 : 1;
    blocks.push_back({i, sz});
    i += sz;
  }
  return blocks;
}

inline double block_modulus(const Eigen::MatrixXd& T, int i, int sz) {
  if (sz == 1) return std::abs(T(i, i));
  // 2x2 blocks hold complex pairs; |lambda|^2 equals the determinant
  double det = T(i, i) * T(i + 1, i + 1) - T(i, i + 1) * T(i + 1, i);
  return std::sqrt(std::abs(det));
}

// Swaps the adjacent diagonal blocks at (i, size p) and (i+p, size q) by an
// orthogonal similarity (direct swap via a Sylvester solve and QR).
inline void swap_schur_blocks(Eigen::MatrixXd& T, Eigen::MatrixXd& Z, int i, int p, int q) {
  int n = static_cast<int>(T.rows());
  Eigen::MatrixXd A11 = T.block(i, i, p, p);
  Eigen::MatrixXd A22 = T.block(i + p, i + p, q, q);
  Eigen::MatrixXd A12 = T.block(i, i + p, p, q);
  Eigen::MatrixXd X = solve_sylvester(A11, A22, A12);
  Eigen::MatrixXd B(p + q, q);
  B.topRows(p) = -X;
  B.bottomRows(q) = Eigen::MatrixXd::Identity(q, q);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  Eigen::MatrixXd Q = qr.householderQ();
  int w = p + q;
  T.block(i, 0, w, n) = Q.transpose() * T.block(i, 0, w, n);
  T.block(0, i, i + w, w) = T.block(0, i, i + w, w) * Q;
  Z.middleCols(i, w) = Z.middleCols(i, w) * Q;
  T.block(i + q, i, p, q).setZero();
}

}  // namespace detail

// Computes the real Schur form and reorders it so that eigenvalues with
// |lambda| < 1 come first. Eigenvalues exactly on the unit circle count as
// unstable here; callers reject near-circle spectra before projecting.
inline OrderedSchur ordered_schur_unit_disk(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("ordered_schur: matrix must be square");
  Eigen::RealSchur<Eigen::MatrixXd> schur(M);
  OrderedSchur out;
  out.T = schur.matrixT();
  out.Z = schur.matrixU();

  bool changed = true;
  while (changed) {
    changed = false;
    auto blocks = detail::schur_blocks(out.T);
    for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
      auto [i1, s1] = blocks[b];
      auto [i2, s2] = blocks[b + 1];
      bool sel1 = detail::block_modulus(out.T, i1, s1) < 1.0;
      bool sel2 = detail::block_modulus(out.T, i2, s2) < 1.0;
      if (!sel1 && sel2) {
        detail::swap_schur_blocks(out.T, out.Z, i1, s1, s2);
        changed = true;
        break;
      }
    }
  }
  out.stableCount = 0;
  for (auto [i, sz] : detail::schur_blocks(out.T))
    if (detail::block_modulus(out.T, i, sz) < 1.0) out.stableCount += sz;
  return out;
}

// Spectral projection onto the invariant subspace of eigenvalues inside the
// unit disk, along the complementary invariant subspace. With the ordered
// form T = [T11 T12; 0 T22] the projection is Z [I -Y; 0 0] Z^T where
// T11 Y - Y T22 = -T12.
struct SpectralSplit {
  Eigen::MatrixXd P;
  int stableCount = 0;
  OrderedSchur schur;
};

inline SpectralSplit spectral_projection_unit_disk(const Eigen::MatrixXd& M) {
  SpectralSplit out;
  out.schur = ordered_schur_unit_disk(M);
  int n = static_cast<int>(M.rows());
  int k = out.schur.stableCount;
  out.stableCount = k;
  if (k == 0) {
    out.P = Eigen::MatrixXd::Zero(n, n);
    return out;
  }
  if (k == n) {
    out.P = Eigen::MatrixXd::Identity(n, n);
    return out;
  }
  const Eigen::MatrixXd& T = out.schur.T;
  const Eigen::MatrixXd& Z = out.schur.Z;
  Eigen::MatrixXd Y = detail::solve_sylvester(T.topLeftCorner(k, k),
                                              T.bottomRightCorner(n - k, n - k),
                                              (-T.topRightCorner(k, n - k)).eval());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  W.topLeftCorner(k, k).setIdentity();
  W.topRightCorner(k, n - k) = -Y;
  out.P = Z * W * Z.transpose();
  return out;
}

}  // namespace glde
