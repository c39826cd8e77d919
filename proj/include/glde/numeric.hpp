#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>

namespace glde {

// Operator 2-norm (largest singular value); Euclidean norm for column vectors.
template <class Derived>
double operator_norm2(const Eigen::MatrixBase<Derived>& M) {
  if (M.cols() == 1 || M.rows() == 1) return M.norm();
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(M.derived());
  return svd.singularValues()(0);
}

namespace detail {

// 10-point Gauss-Legendre rule on [-1, 1].
inline constexpr int kGLCount = 10;
inline constexpr double kGLNode[kGLCount] = {
    -0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
    -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
    0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
    0.9739065285171717};
inline constexpr double kGLWeight[kGLCount] = {
    0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
    0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
    0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
    0.0666713443086881};

inline bool in_half_open(double t, double a, double b, double eps) {
  return t >= a - eps && t < b - eps;
}

inline bool in_left_open(double t, double a, double b, double eps) {
  return t > a + eps && t <= b + eps;
}

}  // namespace detail
}  // namespace glde
