#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "glde/bv_function.hpp"
#include "glde/numeric.hpp"

namespace glde {

namespace detail {

inline void check_pair(const BVMatrixFunction& A, const RegulatedVectorFunction& f) {
  if (A.rows() != A.cols()) throw std::invalid_argument("ks_integrate: integrator must be square");
  if (A.cols() != f.rows()) throw std::invalid_argument("ks_integrate: dimension mismatch");
  if (std::abs(A.period() - f.period()) > 1e-12 * A.period())
    throw std::invalid_argument("ks_integrate: period mismatch");
}

// Sorted union of both density meshes restricted to (u0, u1), bracketed by
// u0 and u1 themselves.
inline std::vector<double> combined_mesh(const std::vector<double>& bpA,
                                         const std::vector<double>& bpF, double u0, double u1,
                                         double eps) {
  std::vector<double> mesh;
  mesh.push_back(u0);
  std::vector<double> interior;
  for (double x : bpA)
    if (x > u0 + eps && x < u1 - eps) interior.push_back(x);
  for (double x : bpF)
    if (x > u0 + eps && x < u1 - eps) interior.push_back(x);
  std::sort(interior.begin(), interior.end());
  for (double x : interior)
    if (x > mesh.back() + eps) mesh.push_back(x);
  mesh.push_back(u1);
  return mesh;
}

// Exact integral of A'(s) f(s) over the window k*omega + [u0, u1], one period.
inline void ks_smooth_window(const BVMatrixFunction& A, const RegulatedVectorFunction& f, long k,
                             double u0, double u1, Eigen::VectorXd& acc) {
  if (u1 - u0 <= A.timeTolerance()) return;
  const auto& bpA = A.density().breakpoints();
  const auto& bpF = f.density().breakpoints();
  const double eps = A.timeTolerance();
  std::vector<double> mesh = combined_mesh(bpA, bpF, u0, u1, eps);
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    double c0 = mesh[i], c1 = mesh[i + 1];
    if (c1 - c0 <= eps) continue;
    double mid = 0.5 * (c0 + c1);
    int jA = A.density().cellIndexAt(mid);
    int jF = f.density().cellIndexAt(mid);
    auto Ac = shift_poly_coeffs(A.density().coeffs(jA), c0 - bpA[jA]);
    auto fd = shift_poly_coeffs(f.density().coeffs(jF), c0 - bpF[jF]);

    double t0 = static_cast<double>(k) * A.period() + c0;
    Eigen::VectorXd f0 = f.value(t0) + f.deltaPost(t0);
    // f restricted to the open cell: f0 plus the antiderivative of its density
    std::vector<Eigen::VectorXd> q;
    q.reserve(fd.size() + 1);
    q.push_back(std::move(f0));
    for (std::size_t m = 0; m < fd.size(); ++m) q.push_back(fd[m] / (m + 1.0));

    double L = c1 - c0;
    int degA = static_cast<int>(Ac.size()) - 1;
    int degQ = static_cast<int>(q.size()) - 1;
    double Lp = L;
    for (int m = 0; m <= degA + degQ; ++m) {
      Eigen::VectorXd rm = Eigen::VectorXd::Zero(acc.size());
      for (int i2 = std::max(0, m - degQ); i2 <= std::min(m, degA); ++i2)
        rm.noalias() += Ac[i2] * q[m - i2];
      acc.noalias() += rm * (Lp / (m + 1.0));
      Lp *= L;
    }
  }
}

}  // namespace detail

// Kurzweil-Stieltjes integral of f against dA over [a, b]:
//   integral of A'(s) f(s) ds
//   + sum over jump times t in [a, b) of (A(t+) - A(t)) f(t)
//   + sum over jump times t in (a, b] of (A(t) - A(t-)) f(t).
// Reversed ranges negate exactly; a == b gives zero.
inline Eigen::VectorXd ks_integrate(const BVMatrixFunction& A, const RegulatedVectorFunction& f,
                                    double a, double b) {
  detail::check_pair(A, f);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.rows());
  if (a == b) return acc;
  if (b < a) return (-ks_integrate(A, f, b, a)).eval();

  const double omega = A.period();
  const double eps = A.timeTolerance();
  long k = 0;
  double u = A.localTime(a, k);
  double left = a;
  while (left < b - eps) {
    double right = std::min(b, (static_cast<double>(k) + 1.0) * omega);
    double u1 = std::min(omega, u + (right - left));
    detail::ks_smooth_window(A, f, k, u, u1, acc);
    left = right;
    u = 0.0;
    ++k;
  }
  for_each_jump_in(A, a, b, eps, [&](double t, const MatrixJump& ev) {
    if (detail::in_half_open(t, a, b, eps)) acc.noalias() += ev.post * f.value(t);
    if (detail::in_left_open(t, a, b, eps)) acc.noalias() += ev.pre * f.value(t);
  });
  return acc;
}

// Riemann-Stieltjes sum over a tagged partition refining `cells` uniform
// cells: every jump time of A or f becomes a partition point, cells adjacent
// to a jump of A are tagged at that jump, all other tags sit at midpoints.
// Converges to ks_integrate as cells grows; used as an independent oracle.
inline Eigen::VectorXd gauge_oracle_integrate(const BVMatrixFunction& A,
                                              const RegulatedVectorFunction& f, double a, double b,
                                              int cells) {
  detail::check_pair(A, f);
  if (cells < 1) throw std::invalid_argument("gauge_oracle_integrate: need at least one cell");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.rows());
  if (a == b) return acc;
  if (b < a) return (-gauge_oracle_integrate(A, f, b, a, cells)).eval();

  const double eps = A.timeTolerance();
  std::vector<double> ajumps, pts;
  for_each_jump_in(A, a, b, 0.0, [&](double t, const MatrixJump&) { ajumps.push_back(t); });
  pts.reserve(cells + 1 + 2 * ajumps.size());
  for (int i = 0; i <= cells; ++i)
    pts.push_back(a + (b - a) * (static_cast<double>(i) / cells));
  for (double t : ajumps)
    if (t > a + eps && t < b - eps) pts.push_back(t);
  for_each_jump_in(f, a, b, 0.0, [&](double t, const VectorJump&) {
    if (t > a + eps && t < b - eps) pts.push_back(t);
  });
  std::sort(pts.begin(), pts.end());
  std::vector<double> part;
  part.reserve(pts.size());
  part.push_back(pts.front());
  for (double x : pts)
    if (x > part.back() + eps) part.push_back(x);
  if (std::abs(part.back() - b) > eps) part.push_back(b);
  part.back() = b;

  auto isAJump = [&](double x) {
    for (double t : ajumps)
      if (std::abs(t - x) <= eps) return true;
    return false;
  };
  Eigen::MatrixXd Aprev = A.value(part[0]);
  for (std::size_t j = 0; j + 1 < part.size(); ++j) {
    double alpha = part[j], beta = part[j + 1];
    double tag = isAJump(alpha) ? alpha : (isAJump(beta) ? beta : 0.5 * (alpha + beta));
    Eigen::MatrixXd Anext = A.value(beta);
    acc.noalias() += (Anext - Aprev) * f.value(tag);
    Aprev = std::move(Anext);
  }
  return acc;
}

// Total variation of F over [a, b] in the operator 2-norm: the integral of
// ||F'(s)|| plus jump norms, with the same one-sided bookkeeping as
// ks_integrate. The norm of a polynomial is not itself polynomial, so the
// smooth part uses panelwise Gauss-Legendre quadrature.
template <class Value>
double variation(const PeriodicBVFunction<Value>& F, double a, double b) {
  if (b < a) std::swap(a, b);
  if (a == b) return 0.0;
  const double omega = F.period();
  const double eps = F.timeTolerance();
  const auto& bp = F.density().breakpoints();
  double total = 0.0;

  long k = 0;
  double u = F.localTime(a, k);
  double left = a;
  constexpr int kPanelsPerCell = 8;
  while (left < b - eps) {
    double right = std::min(b, (static_cast<double>(k) + 1.0) * omega);
    double u1 = std::min(omega, u + (right - left));
    if (u1 - u > eps) {
      std::vector<double> mesh = detail::combined_mesh(bp, bp, u, u1, eps);
      for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
        double c0 = mesh[i], c1 = mesh[i + 1];
        if (c1 - c0 <= eps) continue;
        int j = F.density().cellIndexAt(0.5 * (c0 + c1));
        double base = bp[j];
        double panelLen = (c1 - c0) / kPanelsPerCell;
        for (int p = 0; p < kPanelsPerCell; ++p) {
          double mid = c0 + (p + 0.5) * panelLen, half = 0.5 * panelLen;
          for (int g = 0; g < detail::kGLCount; ++g) {
            double s = mid + half * detail::kGLNode[g];
            total += half * detail::kGLWeight[g] *
                     operator_norm2(F.density().evalLocal(j, s - base));
          }
        }
      }
    }
    left = right;
    u = 0.0;
    ++k;
  }
  for_each_jump_in(F, a, b, eps, [&](double t, const JumpEvent<Value>& ev) {
    if (detail::in_half_open(t, a, b, eps)) total += operator_norm2(ev.post);
    if (detail::in_left_open(t, a, b, eps)) total += operator_norm2(ev.pre);
  });
  return total;
}

// Jump of a matrix-valued path at one time.
struct PathJump {
  double time;
  Eigen::MatrixXd pre;   // V(t) - V(t-)
  Eigen::MatrixXd post;  // V(t+) - V(t)
};

// Kurzweil-Stieltjes integral of phi against a matrix path V given through
// its density V' and jump list. The smooth part uses Gauss-Legendre panels
// whose boundaries are the supplied panel points (plus a, b and the jump
// times); the caller aligns them with any kinks of the integrand.
inline Eigen::VectorXd ks_integrate_path(const std::function<Eigen::MatrixXd(double)>& density,
                                         const std::vector<PathJump>& jumps,
                                         const std::function<Eigen::VectorXd(double)>& phi,
                                         double a, double b, std::vector<double> panelPoints,
                                         Eigen::Index n, double eps) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  if (a == b) return acc;
  if (b < a)
    return (-ks_integrate_path(density, jumps, phi, b, a, std::move(panelPoints), n, eps)).eval();

  for (const auto& ev : jumps) panelPoints.push_back(ev.time);
  std::sort(panelPoints.begin(), panelPoints.end());
  std::vector<double> part{a};
  for (double x : panelPoints)
    if (x > a + eps && x < b - eps && x > part.back() + eps) part.push_back(x);
  part.push_back(b);

  for (std::size_t i = 0; i + 1 < part.size(); ++i) {
    double mid = 0.5 * (part[i] + part[i + 1]), half = 0.5 * (part[i + 1] - part[i]);
    if (half <= 0.0) continue;
    for (int g = 0; g < detail::kGLCount; ++g) {
      double s = mid + half * detail::kGLNode[g];
      acc.noalias() += (half * detail::kGLWeight[g]) * (density(s) * phi(s));
    }
  }
  for (const auto& ev : jumps) {
    if (detail::in_half_open(ev.time, a, b, eps)) acc.noalias() += ev.post * phi(ev.time);
    if (detail::in_left_open(ev.time, a, b, eps)) acc.noalias() += ev.pre * phi(ev.time);
  }
  return acc;
}

}  // namespace glde
