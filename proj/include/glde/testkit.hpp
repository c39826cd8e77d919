#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "glde/floquet.hpp"
#include "glde/propagator.hpp"
#include "glde/system.hpp"

namespace glde::testkit {

inline PiecewisePoly<Eigen::MatrixXd> constant_matrix_density(Eigen::MatrixXd A, double omega) {
  std::vector<Eigen::MatrixXd> cell{std::move(A)};
  return PiecewisePoly<Eigen::MatrixXd>({0.0, omega}, {cell});
}

inline PiecewisePoly<Eigen::VectorXd> constant_vector_density(Eigen::VectorXd v, double omega) {
  std::vector<Eigen::VectorXd> cell{std::move(v)};
  return PiecewisePoly<Eigen::VectorXd>({0.0, omega}, {cell});
}

// Degree-5 piecewise-polynomial fit of t -> amps * sin(freq t + phase), built
// from Taylor expansions at cell midpoints. With 32 cells per period the fit
// error is far below 1e-10.
inline PiecewisePoly<Eigen::VectorXd> sine_vector_density(const Eigen::VectorXd& amps, double freq,
                                                          double phase, double omega,
                                                          int cells = 32) {
  std::vector<double> bp;
  for (int i = 0; i <= cells; ++i) bp.push_back(omega * (static_cast<double>(i) / cells));
  std::vector<std::vector<Eigen::VectorXd>> cellCoeffs;
  for (int j = 0; j < cells; ++j) {
    double tm = 0.5 * (bp[j] + bp[j + 1]);
    std::vector<Eigen::VectorXd> c;
    double fk = 1.0, kfact = 1.0;
    for (int k = 0; k <= kMaxPolyDegree; ++k) {
      if (k > 0) {
        fk *= freq;
        kfact *= k;
      }
      c.push_back(amps *
                  (fk * std::sin(freq * tm + phase + k * std::numbers::pi / 2.0) / kfact));
    }
    cellCoeffs.push_back(shift_poly_coeffs(c, bp[j] - tm));
  }
  return PiecewisePoly<Eigen::VectorXd>(std::move(bp), std::move(cellCoeffs));
}

// Forcing that is zero except for one additive impulse per period.
inline RegulatedVectorFunction impulse_forcing(Eigen::Index n, double omega, double time,
                                               const Eigen::VectorXd& post) {
  return RegulatedVectorFunction(constant_vector_density(Eigen::VectorXd::Zero(n), omega),
                                 {VectorJump{time, Eigen::VectorXd::Zero(n), post}});
}

inline GLDESystem with_forcing(const GLDESystem& base, RegulatedVectorFunction f) {
  return GLDESystem(base.A(), std::move(f));
}

// Reference system with hand-derived monodromy, multipliers, classification
// at the default unit-circle tolerance, and (when forced) the periodic
// initial value.
struct NamedExample {
  std::string id;
  std::string note;
  GLDESystem system;
  Eigen::MatrixXd monodromy;
  std::vector<std::complex<double>> multipliers;
  DichotomyClass expectedDefault;
  std::optional<Eigen::VectorXd> periodicX0;
};

inline std::vector<NamedExample> builtin_examples() {
  using M = Eigen::MatrixXd;
  using V = Eigen::VectorXd;
  using C = std::complex<double>;
  const double em1 = std::exp(-1.0), ep1 = std::exp(1.0);
  std::vector<NamedExample> out;

  out.push_back({"E1", "x' = -x on period 1: monodromy e^{-1}",
                 GLDESystem{BVMatrixFunction(constant_matrix_density(-M::Identity(1, 1), 1.0), {})},
                 em1 * M::Identity(1, 1),
                 {C(em1, 0.0)},
                 DichotomyClass::Dichotomy,
                 std::nullopt});

  out.push_back({"E2", "x' = x on period 1: monodromy e",
                 GLDESystem{BVMatrixFunction(constant_matrix_density(M::Identity(1, 1), 1.0), {})},
                 ep1 * M::Identity(1, 1),
                 {C(ep1, 0.0)},
                 DichotomyClass::Dichotomy,
                 std::nullopt});

  {
    M D = M::Zero(2, 2);
    D(0, 0) = -1.0;
    D(1, 1) = 1.0;
    M mono = M::Zero(2, 2);
    mono(0, 0) = em1;
    mono(1, 1) = ep1;
    out.push_back({"E3", "saddle diag(-1, 1): multipliers e^{-1}, e",
                   GLDESystem{BVMatrixFunction(constant_matrix_density(D, 1.0), {})},
                   mono,
                   {C(ep1, 0.0), C(em1, 0.0)},
                   DichotomyClass::Dichotomy,
                   std::nullopt});
  }

  auto impulsive = [&](double c) {
    BVMatrixFunction A(constant_matrix_density(M::Zero(1, 1), 1.0),
                       {MatrixJump{0.5, M::Zero(1, 1), c * M::Identity(1, 1)}});
    return GLDESystem{std::move(A)};
  };
  out.push_back({"E4c1", "zero density, impulse +1 at 0.5: monodromy 2", impulsive(1.0),
                 2.0 * M::Identity(1, 1), {C(2.0, 0.0)}, DichotomyClass::Dichotomy, std::nullopt});
  out.push_back({"E4cm05", "zero density, impulse -0.5 at 0.5: monodromy 0.5", impulsive(-0.5),
                 0.5 * M::Identity(1, 1), {C(0.5, 0.0)}, DichotomyClass::Dichotomy, std::nullopt});
  out.push_back({"E4c0", "zero density, zero impulse: monodromy exactly 1", impulsive(0.0),
                 M::Identity(1, 1), {C(1.0, 0.0)}, DichotomyClass::Undecidable, std::nullopt});

  {
    // decay e^{-1} over the period exactly cancelled by the impulse factor e
    BVMatrixFunction A(constant_matrix_density(-M::Identity(1, 1), 1.0),
                       {MatrixJump{0.5, M::Zero(1, 1), (ep1 - 1.0) * M::Identity(1, 1)}});
    out.push_back({"E5", "decay cancelled by impulse: unit multiplier by construction",
                   GLDESystem{std::move(A)}, M::Identity(1, 1), {C(1.0, 0.0)},
                   DichotomyClass::Undecidable, std::nullopt});
  }

  {
    // x' = -x plus a unit forcing impulse at 0.5; periodic start value
    // follows from x0 e^{-1} + e^{-1/2} = x0
    BVMatrixFunction A(constant_matrix_density(-M::Identity(1, 1), 1.0), {});
    RegulatedVectorFunction f = impulse_forcing(1, 1.0, 0.5, V::Ones(1));
    V x0 = V::Constant(1, std::exp(-0.5) / (1.0 - em1));
    out.push_back({"E6", "forced impulsive system with closed-form periodic start",
                   GLDESystem{std::move(A), std::move(f)}, em1 * M::Identity(1, 1),
                   {C(em1, 0.0)}, DichotomyClass::Dichotomy, x0});
  }
  return out;
}

inline NamedExample find_example(const std::string& id) {
  for (auto& e : builtin_examples())
    if (e.id == id) return std::move(e);
  throw std::invalid_argument("unknown example id: " + id);
}

// Explicit midpoint method on x' = A'(t) x + f'(t); an independent check for
// jump-free systems (second order in 1/cells).
inline Eigen::VectorXd dense_ode_oracle(const GLDESystem& sys, double s0, const Eigen::VectorXd& x0,
                                        double t, int cells) {
  if (!sys.A().jumps().empty() || (sys.hasForcing() && !sys.f().jumps().empty()))
    throw std::invalid_argument("dense_ode_oracle: jump-free systems only");
  if (cells < 1) throw std::invalid_argument("dense_ode_oracle: need at least one cell");
  double h = (t - s0) / cells;
  Eigen::VectorXd x = x0;
  auto F = [&](double tt, const Eigen::VectorXd& xx) {
    return (sys.densityA(tt) * xx + sys.densityF(tt)).eval();
  };
  for (int i = 0; i < cells; ++i) {
    double ti = s0 + i * h;
    Eigen::VectorXd k1 = F(ti, x);
    Eigen::VectorXd xm = x + (h / 2.0) * k1;
    x += h * F(ti + h / 2.0, xm);
  }
  return x;
}

// Solves the integral equation x(t) = x(s0) + int d[A] x + f(t) - f(s0)
// directly on a tagged partition: cells whose right end is a jump of A use
// the implicit left-jump factor, cells starting at a jump use the explicit
// right-jump factor, and interior cells use a trapezoid step. Independent of
// the RK4 walker; converges as the partition refines.
inline Eigen::VectorXd integral_equation_oracle(const GLDESystem& sys, double s0,
                                                const Eigen::VectorXd& x0, double t1, int cells) {
  if (!(t1 > s0)) throw std::invalid_argument("integral_equation_oracle: needs t1 > s0");
  const double eps = sys.timeTolerance();
  std::vector<double> pts;
  for (int i = 0; i <= cells; ++i)
    pts.push_back(s0 + (t1 - s0) * (static_cast<double>(i) / cells));
  std::vector<double> ajumps;
  for_each_jump_in(sys.A(), s0, t1, 0.0, [&](double t, const MatrixJump&) {
    ajumps.push_back(t);
    if (t > s0 + eps && t < t1 - eps) pts.push_back(t);
  });
  if (sys.hasForcing())
    for_each_jump_in(sys.f(), s0, t1, 0.0, [&](double t, const VectorJump&) {
      if (t > s0 + eps && t < t1 - eps) pts.push_back(t);
    });
  std::sort(pts.begin(), pts.end());
  std::vector<double> part{pts.front()};
  for (double x : pts)
    if (x > part.back() + eps) part.push_back(x);

  auto isAJump = [&](double x) {
    for (double t : ajumps)
      if (std::abs(t - x) <= eps) return true;
    return false;
  };
  Eigen::Index n = sys.dimension();
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd x = x0;
  Eigen::MatrixXd Aprev = sys.A().value(part[0]);
  Eigen::VectorXd fprev =
      sys.hasForcing() ? Eigen::VectorXd(sys.f().value(part[0])) : Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i + 1 < part.size(); ++i) {
    double alpha = part[i], beta = part[i + 1];
    Eigen::MatrixXd Anext = sys.A().value(beta);
    Eigen::MatrixXd dA = Anext - Aprev;
    Eigen::VectorXd df = Eigen::VectorXd::Zero(n);
    if (sys.hasForcing()) {
      Eigen::VectorXd fnext = sys.f().value(beta);
      df = fnext - fprev;
      fprev = std::move(fnext);
    }
    if (isAJump(alpha)) {
      x = x + dA * x + df;
    } else if (isAJump(beta)) {
      x = Eigen::PartialPivLU<Eigen::MatrixXd>(I - dA).solve(x + df);
    } else {
      x = Eigen::PartialPivLU<Eigen::MatrixXd>(I - 0.5 * dA)
              .solve((I + 0.5 * dA) * x + df);
    }
    Aprev = std::move(Anext);
  }
  return x;
}

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::vector<double> random_breakpoints(std::mt19937& rng, double omega, int cells) {
  std::vector<double> bp{0.0};
  for (int i = 1; i < cells; ++i)
    bp.push_back(omega * (i + uniform(rng, -0.35, 0.35)) / cells);
  bp.push_back(omega);
  return bp;
}

inline PiecewisePoly<Eigen::MatrixXd> random_matrix_density(std::mt19937& rng, int n, double omega,
                                                            int cells, int maxDeg = 2) {
  auto bp = random_breakpoints(rng, omega, cells);
  std::vector<std::vector<Eigen::MatrixXd>> cc;
  for (int j = 0; j < cells; ++j) {
    int deg = std::uniform_int_distribution<int>(0, maxDeg)(rng);
    std::vector<Eigen::MatrixXd> c;
    for (int k = 0; k <= deg; ++k) {
      Eigen::MatrixXd A(n, n);
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) A(r, s) = uniform(rng, -0.9, 0.9) / n;
      c.push_back(std::move(A));
    }
    cc.push_back(std::move(c));
  }
  return PiecewisePoly<Eigen::MatrixXd>(std::move(bp), std::move(cc));
}

inline BVMatrixFunction random_coefficient(std::mt19937& rng, int n, double omega, int cells,
                                           int njumps, double jumpScale = 0.3) {
  auto dens = random_matrix_density(rng, n, omega, cells);
  const auto& bp = dens.breakpoints();
  std::vector<MatrixJump> jumps;
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(bp.size()) - 1; ++i) idx.push_back(i);
  std::shuffle(idx.begin(), idx.end(), rng);
  for (int j = 0; j < njumps && j < static_cast<int>(idx.size()); ++j) {
    Eigen::MatrixXd pre(n, n), post(n, n);
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) {
        pre(r, s) = uniform(rng, -jumpScale, jumpScale) / n;
        post(r, s) = uniform(rng, -jumpScale, jumpScale) / n;
      }
    jumps.push_back({bp[idx[j]], std::move(pre), std::move(post)});
  }
  return BVMatrixFunction(std::move(dens), std::move(jumps));
}

inline RegulatedVectorFunction random_forcing(std::mt19937& rng, int n, double omega, int cells,
                                              int njumps, bool periodic) {
  auto bp = random_breakpoints(rng, omega, cells);
  std::vector<std::vector<Eigen::VectorXd>> cc;
  for (int j = 0; j < cells; ++j) {
    int deg = std::uniform_int_distribution<int>(0, 2)(rng);
    std::vector<Eigen::VectorXd> c;
    for (int k = 0; k <= deg; ++k) {
      Eigen::VectorXd v(n);
      for (int r = 0; r < n; ++r) v(r) = uniform(rng, -0.9, 0.9);
      c.push_back(std::move(v));
    }
    cc.push_back(std::move(c));
  }
  std::vector<VectorJump> jumps;
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(bp.size()) - 1; ++i) idx.push_back(i);
  std::shuffle(idx.begin(), idx.end(), rng);
  for (int j = 0; j < njumps && j < static_cast<int>(idx.size()); ++j) {
    Eigen::VectorXd pre(n), post(n);
    for (int r = 0; r < n; ++r) {
      pre(r) = uniform(rng, -0.5, 0.5);
      post(r) = uniform(rng, -0.5, 0.5);
    }
    jumps.push_back({bp[idx[j]], std::move(pre), std::move(post)});
  }
  Eigen::VectorXd base(n);
  for (int r = 0; r < n; ++r) base(r) = uniform(rng, -1.0, 1.0);

  PiecewisePoly<Eigen::VectorXd> dens(bp, cc);
  if (periodic) {
    RegulatedVectorFunction probe(dens, jumps, base);
    Eigen::VectorXd corr = probe.periodIncrement() / omega;
    for (auto& cell : cc) cell[0] -= corr;
    dens = PiecewisePoly<Eigen::VectorXd>(bp, cc);
  }
  return RegulatedVectorFunction(std::move(dens), std::move(jumps), std::move(base));
}

inline GLDESystem random_system(std::mt19937& rng, int n, bool withForcing, bool periodicForcing,
                                int jumpsA = 2, int jumpsF = 1) {
  int cellsA = std::uniform_int_distribution<int>(2, 4)(rng);
  BVMatrixFunction A = random_coefficient(rng, n, 1.0, cellsA, jumpsA);
  if (!withForcing) return GLDESystem{std::move(A)};
  int cellsF = std::uniform_int_distribution<int>(2, 4)(rng);
  RegulatedVectorFunction f = random_forcing(rng, n, 1.0, cellsF, jumpsF, periodicForcing);
  return GLDESystem{std::move(A), std::move(f)};
}

}  // namespace glde::testkit
