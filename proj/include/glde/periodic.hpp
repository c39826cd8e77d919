#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "glde/floquet.hpp"
#include "glde/ks_integral.hpp"
#include "glde/propagator.hpp"

namespace glde {

namespace detail {

// The forcing measure df is periodic by construction (periodic density plus
// per-period jump pattern), so the periodic solve has no extra condition on
// f; a nonzero drift f(omega) - f(0) just enters the formulas as a constant.
inline void require_forcing(const GLDESystem& sys) {
  if (!sys.hasForcing())
    throw std::invalid_argument("periodic solve: system has no forcing term");
}

// (I - M)^{-1} b, raising resonance_error when 1 is a Floquet multiplier.
inline Eigen::VectorXd solve_i_minus_m(const Eigen::MatrixXd& M, const Eigen::VectorXd& b) {
  Eigen::Index n = M.rows();
  Eigen::MatrixXd IM = Eigen::MatrixXd::Identity(n, n) - M;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(IM, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smin = svd.singularValues()(n - 1);
  double smax = svd.singularValues()(0);
  if (smin <= 1e-12 * std::max(1.0, smax))
    throw resonance_error("periodic solve: 1 is a Floquet multiplier");
  return svd.solve(b);
}

}  // namespace detail

// Initial value of the unique omega-periodic solution, from the forced
// response over one period: x0 = (I - M)^{-1} x_f(omega) where x_f solves the
// system from x_f(0) = 0.
inline Eigen::VectorXd periodic_initial_condition(const Propagator& prop) {
  const GLDESystem& sys = prop.system();
  detail::require_forcing(sys);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(sys.dimension());
  Eigen::VectorXd forced = propagate(sys, 0.0, zero, sys.period(), 2, prop.step()).evaluate(sys.period());
  return detail::solve_i_minus_m(prop.monodromy(), forced);
}

// Same value through the closed-form route
//   x0 = [I - U(omega,0)]^{-1} (f(omega) - f(0) - int_0^omega d[U(omega,s)](f(s) - f(0))),
// with the integral evaluated against the dense adjoint path of U(omega, .).
inline Eigen::VectorXd periodic_initial_condition_ks(const Propagator& prop) {
  const GLDESystem& sys = prop.system();
  detail::require_forcing(sys);
  const double omega = sys.period();
  const auto& f = sys.f();

  MatrixPath V = adjoint_path(sys, omega, 0.0, prop.step());  // V(s) = U(omega, s)
  Eigen::VectorXd f0 = f.value(0.0);
  auto phi = [&](double s) { return (f.value(s) - f0).eval(); };
  auto dens = [&](double s) { return (-(V.evaluate(s) * sys.densityA(s))).eval(); };
  std::vector<PathJump> jumps;
  for (const auto& r : V.jumpRecords())
    jumps.push_back({r.time, r.value - r.left, r.right - r.value});
  Eigen::VectorXd J = ks_integrate_path(dens, jumps, phi, 0.0, omega, V.nodeTimes(),
                                        sys.dimension(), sys.timeTolerance());
  return detail::solve_i_minus_m(prop.monodromy(), (f.periodIncrement() - J).eval());
}

struct PeriodicSolveResult {
  Eigen::VectorXd x0;
  Trajectory trajectory;  // over [0, omega]
  double residual = 0.0;  // ||x(omega) - x0||
};

inline PeriodicSolveResult periodic_solution(const GLDESystem& sys, int samples = 257,
                                             double h = 0.0) {
  Propagator prop(sys, h);
  Eigen::VectorXd x0 = periodic_initial_condition(prop);
  Trajectory traj = propagate(sys, 0.0, x0, sys.period(), samples, prop.step());
  double residual = (traj.evaluate(sys.period()) - x0).norm();
  return {std::move(x0), std::move(traj), residual};
}

// Truncation depth giving e^{-alpha N omega} below roughly 2e-9.
inline int default_truncation(double alpha, double omega) {
  if (alpha <= 0.0 || omega <= 0.0) return 64;
  return std::min(64, static_cast<int>(std::ceil(20.0 / (alpha * omega))));
}

// Truncated dichotomy representation of the periodic initial value:
//   x0 = -sum_{j=1}^{N} (P M)^j J + (I-P) J + sum_{k=1}^{N-1} ((I-P) M^{-1})^k J,
//   J  = int_0^omega d[U(0,s)](f(s) - f(0)).
// Converges to periodic_initial_condition at rate e^{-alpha N omega}; both
// power series are formed from the contractive split factors, so growing
// powers of M never appear. Stated for drift-free forcing (f(omega) = f(0));
// a drift would add a third geometric series in the split factors.
inline Eigen::VectorXd dichotomy_representation_x0(const Propagator& prop,
                                                   const DichotomyReport& rep, int N = 0) {
  const GLDESystem& sys = prop.system();
  detail::require_forcing(sys);
  if (sys.f().periodIncrement().norm() > 1e-9 * (1.0 + sys.f().baseValue().norm()))
    throw std::invalid_argument("dichotomy representation: forcing must have zero drift");
  if (rep.classification != DichotomyClass::Dichotomy)
    throw std::invalid_argument("dichotomy representation: system must have a dichotomy");
  if (N <= 0) N = default_truncation(rep.alpha, sys.period());

  const double omega = sys.period();
  const auto& f = sys.f();
  MatrixPath V = adjoint_path(sys, 0.0, omega, prop.step());  // V(s) = U(0, s)
  Eigen::VectorXd f0 = f.value(0.0);
  auto phi = [&](double s) { return (f.value(s) - f0).eval(); };
  auto dens = [&](double s) { return (-(V.evaluate(s) * sys.densityA(s))).eval(); };
  std::vector<PathJump> jumps;
  for (const auto& r : V.jumpRecords())
    jumps.push_back({r.time, r.value - r.left, r.right - r.value});
  Eigen::VectorXd J = ks_integrate_path(dens, jumps, phi, 0.0, omega, V.nodeTimes(),
                                        sys.dimension(), sys.timeTolerance());

  Eigen::Index n = sys.dimension();
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Minv = prop.monodromy().inverse();
  Eigen::MatrixXd Bp = rep.P * prop.monodromy();
  Eigen::MatrixXd Bm = (I - rep.P) * Minv;

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd term = J;
  for (int j = 1; j <= N; ++j) {
    term = Bp * term;
    acc -= term;
  }
  Eigen::VectorXd term2 = (I - rep.P) * J;
  acc += term2;
  for (int k = 1; k <= N - 1; ++k) {
    term2 = Bm * term2;
    acc += term2;
  }
  return acc;
}

}  // namespace glde
