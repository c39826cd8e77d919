#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "glde/numeric.hpp"
#include "glde/ordered_schur.hpp"
#include "glde/propagator.hpp"

namespace glde {

struct MonodromyData {
  Eigen::MatrixXd M;
  std::vector<std::complex<double>> multipliers;
  double omega = 0.0;
};

// Monodromy matrix U(omega, 0) and its eigenvalues (Floquet multipliers),
// sorted by decreasing modulus.
inline MonodromyData monodromy(const Propagator& prop) {
  MonodromyData md;
  md.M = prop.monodromy();
  md.omega = prop.system().period();
  Eigen::EigenSolver<Eigen::MatrixXd> es(md.M);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    md.multipliers.push_back(es.eigenvalues()(i));
  std::sort(md.multipliers.begin(), md.multipliers.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
              if (a.real() != b.real()) return a.real() > b.real();
              return a.imag() > b.imag();
            });
  return md;
}

// Floquet normal form U(t, 0) = G(t) exp(Q t): Q is the principal matrix
// logarithm of the monodromy matrix scaled by 1/omega (complex in general),
// and G is the omega-periodic factor. G is sampled on [0, 2*omega] so its
// periodicity is measured from two independently propagated periods.
struct FloquetDecomposition {
  Eigen::MatrixXcd Q;
  bool realLogExists = false;   // no multiplier on the closed negative real axis
  double reconstructionError = 0.0;  // ||exp(Q omega) - M||_2
  double periodicityError = 0.0;     // max ||G(t+omega) - G(t)||_2 incl. one-sided values
  double maxG = 0.0, maxGInv = 0.0;  // over [0, omega], one-sided values included
  std::vector<double> sampleTimes;   // in [0, omega]
  std::vector<Eigen::MatrixXcd> G;   // point values at sampleTimes
};

inline FloquetDecomposition floquet_decompose(const Propagator& prop, int gridPerPeriod = 128) {
  const GLDESystem& sys = prop.system();
  const double omega = sys.period();
  const Eigen::MatrixXd& M = prop.monodromy();

  FloquetDecomposition fd;
  Eigen::MatrixXcd Mc = M.cast<std::complex<double>>();
  fd.Q = Mc.log() / omega;
  fd.reconstructionError = operator_norm2(Eigen::MatrixXcd((fd.Q * omega).exp() - Mc));

  Eigen::EigenSolver<Eigen::MatrixXd> es(M);
  fd.realLogExists = true;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    std::complex<double> rho = es.eigenvalues()(i);
    if (std::abs(rho) < 1e-300) throw std::invalid_argument("floquet: singular monodromy matrix");
    if (std::abs(rho.imag()) <= 1e-12 * std::abs(rho) && rho.real() <= 0.0) fd.realLogExists = false;
  }

  MatrixPath path = fundamental_path(sys, 0.0, 2.0 * omega, prop.step());
  const double eps = sys.timeTolerance();

  std::vector<double> times;
  for (int i = 0; i <= gridPerPeriod; ++i)
    times.push_back(omega * (static_cast<double>(i) / gridPerPeriod));
  for (const auto& r : path.jumpRecords())
    if (r.time < omega - eps) times.push_back(r.time);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [&](double a, double b) { return std::abs(a - b) <= eps; }),
              times.end());

  Eigen::MatrixXcd expQmw = (-fd.Q * omega).exp();
  auto record = [&](double t, const Eigen::MatrixXd& U0, const Eigen::MatrixXd& U1,
                    const Eigen::MatrixXcd& expQmt) {
    Eigen::MatrixXcd G0 = U0.cast<std::complex<double>>() * expQmt;
    Eigen::MatrixXcd G1 = U1.cast<std::complex<double>>() * expQmt * expQmw;
    fd.periodicityError = std::max(fd.periodicityError, operator_norm2(Eigen::MatrixXcd(G1 - G0)));
    fd.maxG = std::max(fd.maxG, operator_norm2(G0));
    fd.maxGInv = std::max(fd.maxGInv, operator_norm2(Eigen::MatrixXcd(G0.inverse())));
    return G0;
  };

  for (double t : times) {
    Eigen::MatrixXcd expQmt = (-fd.Q * t).exp();
    auto side0 = path.oneSided(t);
    auto side1 = path.oneSided(t + omega);
    Eigen::MatrixXcd G0 = record(t, side0.value, side1.value, expQmt);
    if ((side0.left - side0.value).norm() > 0 || (side1.left - side1.value).norm() > 0) {
      record(t, side0.left, side1.left, expQmt);
      record(t, side0.right, side1.right, expQmt);
    }
    fd.sampleTimes.push_back(t);
    fd.G.push_back(std::move(G0));
  }
  return fd;
}

enum class DichotomyClass { Dichotomy, NoDichotomy, Undecidable };

inline const char* to_string(DichotomyClass c) {
  switch (c) {
    case DichotomyClass::Dichotomy: return "dichotomy";
    case DichotomyClass::NoDichotomy: return "no-dichotomy";
    case DichotomyClass::Undecidable: return "undecidable";
  }
  return "?";
}

struct DichotomyReport {
  DichotomyClass classification = DichotomyClass::Undecidable;
  double epsUc = 0.0;
  std::vector<std::complex<double>> stable, unstable, critical;
  double alpha = 0.0;  // min |ln|rho|| / omega over the spectrum (dichotomy only)
  double K = 0.0;      // dichotomy constant estimate (dichotomy only)
  Eigen::MatrixXd P;   // spectral projection onto the stable subspace
  int stableCount = -1;
};

// Classifies the spectrum against the unit circle and, for a dichotomy,
// produces the projection P, the rate alpha and the constant K. A multiplier
// within epsUc of the circle makes the answer Undecidable; an exact unit
// modulus (only observable with epsUc = 0) means NoDichotomy. K combines the
// constant-coefficient bound of exp(Q t) split by P with the size of the
// periodic factor and its inverse:
//   K = K0 * max||G|| * max||G^{-1}||,
//   K0 = max over tau in [0, 4 omega] of
//        e^{alpha tau} max(||exp(Q tau) P||, ||exp(-Q tau)(I-P)||).
inline DichotomyReport dichotomy_check(const MonodromyData& md, const FloquetDecomposition& fd,
                                       double epsUc = 1e-8) {
  DichotomyReport rep;
  rep.epsUc = epsUc;
  Eigen::Index n = md.M.rows();
  rep.P = Eigen::MatrixXd::Zero(n, n);

  bool anyCritical = false, anyExactUnit = false;
  for (const auto& rho : md.multipliers) {
    double d = std::abs(std::abs(rho) - 1.0);
    if (d < epsUc || d == 0.0) {
      rep.critical.push_back(rho);
      anyCritical = anyCritical || d < epsUc;
      anyExactUnit = anyExactUnit || d == 0.0;
    } else if (std::abs(rho) < 1.0) {
      rep.stable.push_back(rho);
    } else {
      rep.unstable.push_back(rho);
    }
  }
  if (anyCritical) {
    rep.classification = DichotomyClass::Undecidable;
    return rep;
  }
  if (anyExactUnit) {
    rep.classification = DichotomyClass::NoDichotomy;
    return rep;
  }
  rep.classification = DichotomyClass::Dichotomy;

  double minAbsLog = std::numeric_limits<double>::infinity();
  for (const auto& rho : md.multipliers)
    minAbsLog = std::min(minAbsLog, std::abs(std::log(std::abs(rho))));
  rep.alpha = minAbsLog / md.omega;

  SpectralSplit split = spectral_projection_unit_disk(md.M);
  rep.P = split.P;
  rep.stableCount = split.stableCount;

  Eigen::MatrixXcd Pc = rep.P.cast<std::complex<double>>();
  Eigen::MatrixXcd Qc = Eigen::MatrixXcd(md.M.cast<std::complex<double>>()).log() / md.omega;
  Eigen::MatrixXcd Ic = Eigen::MatrixXcd::Identity(n, n);
  double K0 = 0.0;
  const int steps = 4 * 256;
  for (int i = 0; i <= steps; ++i) {
    double tau = 4.0 * md.omega * (static_cast<double>(i) / steps);
    double grow = std::exp(rep.alpha * tau);
    Eigen::MatrixXcd Ep = (Qc * tau).exp();
    Eigen::MatrixXcd Em = (-Qc * tau).exp();
    K0 = std::max(K0, grow * operator_norm2(Eigen::MatrixXcd(Ep * Pc)));
    K0 = std::max(K0, grow * operator_norm2(Eigen::MatrixXcd(Em * (Ic - Pc))));
  }
  rep.K = K0 * fd.maxG * fd.maxGInv;
  return rep;
}

// Convenience wrapper: monodromy + Floquet decomposition + classification.
inline DichotomyReport analyze_dichotomy(const Propagator& prop, double epsUc = 1e-8) {
  MonodromyData md = monodromy(prop);
  FloquetDecomposition fd = floquet_decompose(prop);
  return dichotomy_check(md, fd, epsUc);
}

struct MultiplierCheckResult {
  double maxRelDeviation = 0.0;
  double rho = 0.0;
};

// For a real multiplier rho with real eigenvector xi, the solution through xi
// satisfies x(t + omega) = rho x(t) for all t. Propagates over
// [-nPeriods*omega, nPeriods*omega] and reports the worst relative deviation
// on a grid that avoids jump times.
inline MultiplierCheckResult multiplier_solution_check(const Propagator& prop, double rho,
                                                       const Eigen::VectorXd& xi, int nPeriods,
                                                       int gridPerPeriod = 32) {
  const GLDESystem& sys = prop.system();
  if (sys.hasForcing())
    throw std::invalid_argument("multiplier check: homogeneous systems only");
  if (nPeriods < 1) throw std::invalid_argument("multiplier check: need at least one period");
  double scale = xi.norm();
  if (scale <= 0.0) throw std::invalid_argument("multiplier check: zero vector");
  if ((prop.monodromy() * xi - rho * xi).norm() > 1e-10 * (1.0 + std::abs(rho)) * scale)
    throw std::invalid_argument("multiplier check: (rho, xi) is not an eigenpair of the monodromy matrix");

  const double omega = sys.period();
  Trajectory fwd = propagate(sys, 0.0, xi, nPeriods * omega, 2, prop.step());
  Trajectory bwd = propagate(sys, 0.0, xi, -nPeriods * omega, 2, prop.step());
  auto eval = [&](double t) { return t >= 0.0 ? fwd.evaluate(t) : bwd.evaluate(t); };

  MultiplierCheckResult res;
  res.rho = rho;
  // offset grid so samples never sit on a jump time
  int total = (2 * nPeriods - 1) * gridPerPeriod;
  for (int i = 0; i < total; ++i) {
    double t = -nPeriods * omega + (i + 0.382) * omega / gridPerPeriod;
    Eigen::VectorXd a = eval(t + omega), b = eval(t);
    double dev = (a - rho * b).norm() / std::max(b.norm(), 1e-300);
    res.maxRelDeviation = std::max(res.maxRelDeviation, dev);
  }
  return res;
}

struct DichotomyAuditResult {
  double worstRatio = 0.0;
  double K = 0.0;
  bool pass = false;
};

// Checks the dichotomy bounds against directly computed transition matrices:
// ratio = ||U(t,0) P U(0,s)|| / e^{-alpha(t-s)} for t >= s (and the mirrored
// bound with I-P for t <= s) over a grid in [-2 omega, 2 omega] that includes
// the jump times. Passes when the worst ratio stays within 5% of K.
inline DichotomyAuditResult dichotomy_bound_audit(const Propagator& prop,
                                                  const DichotomyReport& rep,
                                                  int gridPerPeriod = 16) {
  if (rep.classification != DichotomyClass::Dichotomy)
    throw std::invalid_argument("dichotomy audit: report must classify as dichotomy");
  const GLDESystem& sys = prop.system();
  const double omega = sys.period();
  const double eps = sys.timeTolerance();

  std::vector<double> grid;
  for (int i = 0; i <= 4 * gridPerPeriod; ++i)
    grid.push_back(-2.0 * omega + omega * (static_cast<double>(i) / gridPerPeriod));
  for_each_jump_in(sys.A(), -2.0 * omega, 2.0 * omega, 0.0,
                   [&](double t, const MatrixJump&) { grid.push_back(t); });
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [&](double a, double b) { return std::abs(a - b) <= eps; }),
             grid.end());

  Eigen::Index n = sys.dimension();
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  std::vector<Eigen::MatrixXd> fwd, bwd, fwdP, bwdQ;
  for (double t : grid) {
    fwd.push_back(prop.transition(t, 0.0));
    bwd.push_back(prop.transition(0.0, t));
    fwdP.push_back(fwd.back() * rep.P);
    bwdQ.push_back((I - rep.P) * bwd.back());
  }
  DichotomyAuditResult res;
  res.K = rep.K;
  for (std::size_t a = 0; a < grid.size(); ++a)
    for (std::size_t b = 0; b < grid.size(); ++b) {
      double t = grid[a], s = grid[b];
      if (t >= s) {
        double r = operator_norm2(Eigen::MatrixXd(fwdP[a] * bwd[b])) /
                   std::exp(-rep.alpha * (t - s));
        res.worstRatio = std::max(res.worstRatio, r);
      }
      if (t <= s) {
        double r = operator_norm2(Eigen::MatrixXd(fwd[a] * bwdQ[b])) /
                   std::exp(-rep.alpha * (s - t));
        res.worstRatio = std::max(res.worstRatio, r);
      }
    }
  res.pass = res.worstRatio <= res.K * 1.05;
  return res;
}

}  // namespace glde
