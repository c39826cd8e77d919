#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "glde/ks_integral.hpp"
#include "glde/system.hpp"
#include "glde/trajectory.hpp"

namespace glde {

inline double default_step(const GLDESystem& sys) { return sys.period() / 4096.0; }

namespace detail {

// Cell indices and local offsets at the start of one smooth segment; the
// walker guarantees a segment never crosses a mesh breakpoint of A or f.
struct SegmentCtx {
  int cellA = -1, cellF = -1;
  double uA0 = 0.0, uF0 = 0.0;
};

inline SegmentCtx make_ctx(const GLDESystem& sys, double p, double q) {
  SegmentCtx c;
  double mid = 0.5 * (p + q);
  long k = 0;
  double uA = sys.A().localTime(mid, k);
  c.cellA = sys.A().density().cellIndexAt(uA);
  c.uA0 = uA - sys.A().density().breakpoints()[c.cellA] - (mid - p);
  if (sys.hasForcing()) {
    long k2 = 0;
    double uF = sys.f().localTime(mid, k2);
    c.cellF = sys.f().density().cellIndexAt(uF);
    c.uF0 = uF - sys.f().density().breakpoints()[c.cellF] - (mid - p);
  }
  return c;
}

// x' = A'(t) x + f'(t); jumps move x(t-) -> x(t) -> x(t+).
struct StatePolicy {
  using Value = Eigen::VectorXd;
  const GLDESystem& sys;
  Value rhs(const SegmentCtx& c, double off, const Value& x) const {
    Value r = sys.A().density().evalLocal(c.cellA, c.uA0 + off) * x;
    if (sys.hasForcing()) r += sys.f().density().evalLocal(c.cellF, c.uF0 + off);
    return r;
  }
  Value arriveFwd(const SystemJump& j, const Value& x) const { return j.preInv * (x + j.preF); }
  Value leaveFwd(const SystemJump& j, const Value& x) const { return j.postFactor * x + j.postF; }
  Value arriveBwd(const SystemJump& j, const Value& x) const { return j.postInv * (x - j.postF); }
  Value leaveBwd(const SystemJump& j, const Value& x) const { return j.preFactor * x - j.preF; }
};

// X(t) = U(t, anchor) X0: the homogeneous matrix flow in the first argument.
struct FundamentalPolicy {
  using Value = Eigen::MatrixXd;
  const GLDESystem& sys;
  Value rhs(const SegmentCtx& c, double off, const Value& X) const {
    return sys.A().density().evalLocal(c.cellA, c.uA0 + off) * X;
  }
  Value arriveFwd(const SystemJump& j, const Value& X) const { return j.preInv * X; }
  Value leaveFwd(const SystemJump& j, const Value& X) const { return j.postFactor * X; }
  Value arriveBwd(const SystemJump& j, const Value& X) const { return j.postInv * X; }
  Value leaveBwd(const SystemJump& j, const Value& X) const { return j.preFactor * X; }
};

// V(s) = V0 U(anchor, s): the flow in the second argument, so the jump
// factors act from the right and invert.
struct AdjointPolicy {
  using Value = Eigen::MatrixXd;
  const GLDESystem& sys;
  Value rhs(const SegmentCtx& c, double off, const Value& X) const {
    return -(X * sys.A().density().evalLocal(c.cellA, c.uA0 + off));
  }
  Value arriveFwd(const SystemJump& j, const Value& X) const { return X * j.preFactor; }
  Value leaveFwd(const SystemJump& j, const Value& X) const { return X * j.postInv; }
  Value arriveBwd(const SystemJump& j, const Value& X) const { return X * j.postFactor; }
  Value leaveBwd(const SystemJump& j, const Value& X) const { return X * j.preInv; }
};

inline const SystemJump* jump_at_abs(const GLDESystem& sys, double t) {
  long k = 0;
  double u = sys.A().localTime(t, k);
  return sys.jumpAtLocal(u);
}

// Steps from `from` to `to` (either direction) with a fixed-step RK4 on each
// smooth segment; segments never span a mesh breakpoint or jump time.
template <class Policy>
DensePath<typename Policy::Value> walk(const GLDESystem& sys, double from, double to, double h,
                                       typename Policy::Value start, const Policy& pol) {
  using Value = typename Policy::Value;
  const double eps = sys.timeTolerance();
  const double omega = sys.period();
  DensePath<Value> path(eps);
  Value cur = std::move(start);

  if (std::abs(to - from) <= eps) {
    if (const SystemJump* j = jump_at_abs(sys, from))
      path.addJump({from, pol.leaveBwd(*j, cur), cur, pol.leaveFwd(*j, cur)});
    path.addNode(from, cur, (cur - cur).eval());
    path.finalize();
    return path;
  }

  const bool fwd = to > from;
  double lo = std::min(from, to), hi = std::max(from, to);
  std::vector<double> bounds;
  bounds.push_back(from);
  {
    std::vector<double> evts;
    long kmin = static_cast<long>(std::floor(lo / omega)) - 1;
    long kmax = static_cast<long>(std::floor(hi / omega)) + 1;
    const auto& base = sys.eventTimes();
    for (long k = kmin; k <= kmax; ++k)
      for (std::size_t i = 0; i + 1 < base.size(); ++i) {
        double t = static_cast<double>(k) * omega + base[i];
        if (t > lo + eps && t < hi - eps) evts.push_back(t);
      }
    std::sort(evts.begin(), evts.end());
    if (!fwd) std::reverse(evts.begin(), evts.end());
    bounds.insert(bounds.end(), evts.begin(), evts.end());
  }
  bounds.push_back(to);

  if (const SystemJump* j = jump_at_abs(sys, from)) {
    Value left = pol.leaveBwd(*j, cur), right = pol.leaveFwd(*j, cur);
    path.addJump({from, left, cur, right});
    cur = fwd ? right : left;
  }

  for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
    double p = bounds[b], q = bounds[b + 1];
    if (std::abs(q - p) > eps) {
      SegmentCtx ctx = make_ctx(sys, p, q);
      int nsub = std::max(1, static_cast<int>(std::ceil(std::abs(q - p) / h - 1e-9)));
      double dt = (q - p) / nsub;
      path.addNode(p, cur, pol.rhs(ctx, 0.0, cur));
      for (int i = 0; i < nsub; ++i) {
        double off = i * dt;
        Value k1 = pol.rhs(ctx, off, cur);
        Value xt = cur + (dt / 2.0) * k1;
        Value k2 = pol.rhs(ctx, off + dt / 2.0, xt);
        xt = cur + (dt / 2.0) * k2;
        Value k3 = pol.rhs(ctx, off + dt / 2.0, xt);
        xt = cur + dt * k3;
        Value k4 = pol.rhs(ctx, off + dt, xt);
        cur += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        double tNode = (i + 1 == nsub) ? q : p + (i + 1) * dt;
        path.addNode(tNode, cur, pol.rhs(ctx, off + dt, cur));
      }
    }
    if (const SystemJump* j = jump_at_abs(sys, q)) {
      bool last = (b + 2 == bounds.size());
      if (fwd) {
        Value point = pol.arriveFwd(*j, cur);
        Value right = pol.leaveFwd(*j, point);
        path.addJump({q, cur, point, right});
        cur = last ? point : right;
      } else {
        Value point = pol.arriveBwd(*j, cur);
        Value left = pol.leaveBwd(*j, point);
        path.addJump({q, left, point, cur});
        cur = last ? point : left;
      }
    }
  }
  path.finalize();
  return path;
}

}  // namespace detail

// Solves the initial value problem from (s0, x0) to t1 (either direction) and
// keeps a dense record. `samples` uniform times plus a left/point/right triple
// at every crossed jump end up in Trajectory::samples().
inline Trajectory propagate(const GLDESystem& sys, double s0, const Eigen::VectorXd& x0, double t1,
                            int samples = 257, double h = 0.0) {
  if (x0.size() != sys.dimension()) throw std::invalid_argument("propagate: state dimension mismatch");
  if (h <= 0.0) h = default_step(sys);
  auto path = detail::walk(sys, s0, t1, h, Eigen::VectorXd(x0), detail::StatePolicy{sys});
  return Trajectory(std::move(path), s0, x0, samples);
}

// Dense path of X(t) = U(t, from) for t between from and to.
inline MatrixPath fundamental_path(const GLDESystem& sys, double from, double to, double h = 0.0) {
  if (h <= 0.0) h = default_step(sys);
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(sys.dimension(), sys.dimension());
  return detail::walk(sys, from, to, h, I, detail::FundamentalPolicy{sys});
}

// Dense path of V(s) = U(anchor, s) for s between anchor and to.
inline MatrixPath adjoint_path(const GLDESystem& sys, double anchor, double to, double h = 0.0) {
  if (h <= 0.0) h = default_step(sys);
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(sys.dimension(), sys.dimension());
  return detail::walk(sys, anchor, to, h, I, detail::AdjointPolicy{sys});
}

enum class Side { TPlus, TMinus, SPlus, SMinus };

// Transition matrices U(t, s) of the homogeneous part. Smooth flow factors
// are cached per mesh cell at construction, so repeated queries only step
// through partial cells.
class Propagator {
 public:
  explicit Propagator(const GLDESystem& sys, double h = 0.0)
      : sys_(&sys), h_(h > 0.0 ? h : default_step(sys)) {
    const auto& bp = sys.A().density().breakpoints();
    cellFlow_.reserve(bp.size() - 1);
    for (std::size_t j = 0; j + 1 < bp.size(); ++j)
      cellFlow_.push_back(flowInCell(static_cast<int>(j), bp[j], bp[j + 1]));
    M_ = transitionWithinPeriod(sys.period(), 0.0);
  }

  const GLDESystem& system() const { return *sys_; }
  double step() const { return h_; }
  const Eigen::MatrixXd& monodromy() const { return M_; }

  Eigen::MatrixXd transition(double t, double s) const {
    Eigen::Index n = sys_->dimension();
    if (t == s) return Eigen::MatrixXd::Identity(n, n);
    if (t < s) return transition(s, t).inverse();
    const double omega = sys_->period();
    long k = 0;
    double u = sys_->A().localTime(s, k);
    double t0 = t - static_cast<double>(k) * omega;
    long m = 0;
    double v = sys_->A().localTime(t0, m);
    if (m <= 0) return transitionWithinPeriod(v, u);
    Eigen::MatrixXd U = transitionWithinPeriod(omega, u);
    for (long i = 1; i < m; ++i) U = M_ * U;
    if (v > sys_->timeTolerance()) U = transitionWithinPeriod(v, 0.0) * U;
    return U;
  }

  // U(t+, s), U(t-, s), U(t, s+), U(t, s-): the point transition matrix
  // composed with the appropriate jump factor.
  Eigen::MatrixXd oneSidedTransition(double t, double s, Side side) const {
    Eigen::MatrixXd U = transition(t, s);
    const SystemJump* jt = detail::jump_at_abs(*sys_, t);
    const SystemJump* js = detail::jump_at_abs(*sys_, s);
    switch (side) {
      case Side::TPlus:
        return jt ? (jt->postFactor * U).eval() : U;
      case Side::TMinus:
        return jt ? (jt->preFactor * U).eval() : U;
      case Side::SPlus:
        return js ? (U * js->postInv).eval() : U;
      case Side::SMinus:
        return js ? (U * js->preInv).eval() : U;
    }
    return U;
  }

 private:
  Eigen::MatrixXd flowInCell(int cell, double u0, double u1) const {
    const auto& A = sys_->A();
    double base = A.density().breakpoints()[cell];
    Eigen::Index n = sys_->dimension();
    Eigen::MatrixXd X = Eigen::MatrixXd::Identity(n, n);
    double len = u1 - u0;
    if (len <= sys_->timeTolerance()) return X;
    int nsub = std::max(1, static_cast<int>(std::ceil(len / h_ - 1e-9)));
    double dt = len / nsub;
    auto Ad = [&](double u) { return A.density().evalLocal(cell, u - base); };
    for (int i = 0; i < nsub; ++i) {
      double u = u0 + i * dt;
      Eigen::MatrixXd k1 = Ad(u) * X;
      Eigen::MatrixXd k2 = Ad(u + dt / 2.0) * (X + (dt / 2.0) * k1);
      Eigen::MatrixXd k3 = Ad(u + dt / 2.0) * (X + (dt / 2.0) * k2);
      Eigen::MatrixXd k4 = Ad(u + dt) * (X + dt * k3);
      X += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return X;
  }

  // U(u1, u0) for 0 <= u0 <= u1 <= period, assembled from cached cell flows,
  // partial-cell steps and jump factors.
  Eigen::MatrixXd transitionWithinPeriod(double u1, double u0) const {
    const double eps = sys_->timeTolerance();
    Eigen::Index n = sys_->dimension();
    Eigen::MatrixXd U = Eigen::MatrixXd::Identity(n, n);
    if (u1 - u0 <= eps) return U;
    const auto& bp = sys_->A().density().breakpoints();
    if (const SystemJump* j = sys_->jumpAtLocal(u0)) U = j->postFactor * U;
    int c = sys_->A().density().cellIndexAt(std::min(u0, bp[bp.size() - 2]));
    double cur = u0;
    while (true) {
      double cellEnd = bp[c + 1];
      if (cellEnd >= u1 - eps) {
        U = flowPiece(c, cur, u1) * U;
        break;
      }
      U = flowPiece(c, cur, cellEnd) * U;
      if (const SystemJump* j = sys_->jumpAtLocal(cellEnd))
        U = j->postFactor * (j->preInv * U);
      cur = cellEnd;
      ++c;
    }
    if (const SystemJump* j = sys_->jumpAtLocal(u1)) U = j->preInv * U;
    return U;
  }

  Eigen::MatrixXd flowPiece(int cell, double a, double b) const {
    const auto& bp = sys_->A().density().breakpoints();
    const double eps = sys_->timeTolerance();
    if (std::abs(a - bp[cell]) <= eps && std::abs(b - bp[cell + 1]) <= eps) return cellFlow_[cell];
    return flowInCell(cell, a, b);
  }

  const GLDESystem* sys_;
  double h_;
  std::vector<Eigen::MatrixXd> cellFlow_;
  Eigen::MatrixXd M_;
};

struct VocResult {
  Eigen::VectorXd direct, formula;
  double residual = 0.0;
  bool pass = false;
};

// Compares direct propagation with the variation-of-constants expression
//   x(t) = U(t,s0) x0 + f(t) - f(s0) - int_{s0}^{t} d[U(t,.)](f(.) - f(s0)).
inline VocResult voc_crosscheck(const GLDESystem& sys, double s0, const Eigen::VectorXd& x0,
                                double t, double tol = 1e-6, double h = 0.0) {
  if (h <= 0.0) h = default_step(sys);
  Trajectory traj = propagate(sys, s0, x0, t, 2, h);
  Eigen::VectorXd direct = traj.evaluate(t);

  MatrixPath W = adjoint_path(sys, t, s0, h);  // W(s) = U(t, s)
  Eigen::VectorXd formula = W.evaluate(s0) * x0;
  if (sys.hasForcing()) {
    const auto& f = sys.f();
    Eigen::VectorXd fs0 = f.value(s0);
    formula += f.value(t) - fs0;
    auto phi = [&](double s) { return (f.value(s) - fs0).eval(); };
    auto dens = [&](double s) { return (-(W.evaluate(s) * sys.densityA(s))).eval(); };
    std::vector<PathJump> jumps;
    for (const auto& r : W.jumpRecords())
      jumps.push_back({r.time, r.value - r.left, r.right - r.value});
    formula -= ks_integrate_path(dens, jumps, phi, s0, t, W.nodeTimes(), sys.dimension(),
                                 sys.timeTolerance());
  }
  VocResult res;
  res.direct = std::move(direct);
  res.formula = std::move(formula);
  res.residual = (res.formula - res.direct).norm();
  res.pass = res.residual <= tol;
  return res;
}

}  // namespace glde
