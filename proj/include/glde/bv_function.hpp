#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "glde/piecewise_poly.hpp"

namespace glde {

// Jump at a single time inside the base period: pre = F(t) - F(t-),
// post = F(t+) - F(t).
template <class Value>
struct JumpEvent {
  double time;
  Value pre;
  Value post;
};

// Function of locally bounded variation on the whole line, described on one
// period [0, omega] by an absolutely continuous part (piecewise-polynomial
// density) plus finitely many jumps, and extended by
//   F(t + k*omega) = F(t) + k*C,   C = F(omega) - F(0).
// Jump times live in [0, omega) and are breakpoints of the density mesh; the
// constructor inserts any that are missing.
template <class Value>
class PeriodicBVFunction {
 public:
  PeriodicBVFunction(PiecewisePoly<Value> density, std::vector<JumpEvent<Value>> jumps)
      : PeriodicBVFunction(std::move(density), std::move(jumps), Value()) {}

  PeriodicBVFunction(PiecewisePoly<Value> density, std::vector<JumpEvent<Value>> jumps,
                     Value baseValue)
      : density_(std::move(density)), jumps_(std::move(jumps)), base_(std::move(baseValue)) {
    if (density_.domainStart() != 0.0) throw std::invalid_argument("bv function: density mesh must start at 0");
    omega_ = density_.domainEnd();
    if (!(omega_ > 0.0)) throw std::invalid_argument("bv function: period must be positive");
    timeEps_ = 1e-10 * omega_;
    if (base_.size() == 0) base_ = density_.zeroValue();
    if (base_.rows() != density_.zeroValue().rows() || base_.cols() != density_.zeroValue().cols())
      throw std::invalid_argument("bv function: base value dimension mismatch");

    std::sort(jumps_.begin(), jumps_.end(),
              [](const JumpEvent<Value>& a, const JumpEvent<Value>& b) { return a.time < b.time; });
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
      auto& ev = jumps_[i];
      if (ev.time < 0.0 || ev.time >= omega_ - timeEps_)
        throw std::invalid_argument("bv function: jump time outside [0, period)");
      if (i > 0 && ev.time - jumps_[i - 1].time <= timeEps_)
        throw std::invalid_argument("bv function: duplicate jump time");
      if (ev.pre.rows() != base_.rows() || ev.pre.cols() != base_.cols() ||
          ev.post.rows() != base_.rows() || ev.post.cols() != base_.cols())
        throw std::invalid_argument("bv function: jump dimension mismatch");
      if (ev.time > 0.0) density_.insertBreakpoint(ev.time, timeEps_);
    }

    const auto& bp = density_.breakpoints();
    jumpAtBreak_.assign(bp.size(), -1);
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
      auto it = std::lower_bound(bp.begin(), bp.end(), jumps_[i].time - timeEps_);
      std::size_t j = static_cast<std::size_t>(it - bp.begin());
      jumps_[i].time = bp[j];  // snap to the mesh point exactly
      jumpAtBreak_[j] = static_cast<int>(i);
    }
    if (!jumps_.empty() && jumps_.front().time == 0.0)
      jumpAtBreak_.back() = 0;  // the pre part of the jump at 0 recurs at omega

    // Point values of the base-period function at every breakpoint.
    valueAtBreak_.assign(bp.size(), base_);
    for (std::size_t j = 0; j + 1 < bp.size(); ++j) {
      Value v = valueAtBreak_[j];
      if (jumpAtBreak_[j] >= 0) v += jumps_[jumpAtBreak_[j]].post;
      v += density_.integrateCell(static_cast<int>(j), 0.0, bp[j + 1] - bp[j]);
      if (jumpAtBreak_[j + 1] >= 0) v += jumps_[jumpAtBreak_[j + 1]].pre;
      valueAtBreak_[j + 1] = v;
    }
    increment_ = valueAtBreak_.back() - base_;
  }

  double period() const { return omega_; }
  double timeTolerance() const { return timeEps_; }
  Eigen::Index rows() const { return base_.rows(); }
  Eigen::Index cols() const { return base_.cols(); }
  const PiecewisePoly<Value>& density() const { return density_; }
  const std::vector<JumpEvent<Value>>& jumps() const { return jumps_; }
  const Value& baseValue() const { return base_; }
  const Value& periodIncrement() const { return increment_; }

  bool zeroIncrement(double tol = 1e-12) const { return increment_.norm() <= tol; }

  // Reduces t to u + k*omega with u in [0, omega), snapping u onto mesh
  // breakpoints to keep jump lookups robust across period shifts.
  double localTime(double t, long& k) const {
    k = static_cast<long>(std::floor(t / omega_));
    double u = t - static_cast<double>(k) * omega_;
    if (u >= omega_ - timeEps_) { u = 0.0; ++k; }
    if (u < 0.0) u = 0.0;
    const auto& bp = density_.breakpoints();
    auto it = std::lower_bound(bp.begin(), bp.end(), u);
    if (it != bp.end() && std::abs(*it - u) <= timeEps_) return *it;
    if (it != bp.begin() && std::abs(*(it - 1) - u) <= timeEps_) return *(it - 1);
    return u;
  }

  // Jump at local time u (nullptr when none).
  const JumpEvent<Value>* jumpAtLocal(double u) const {
    for (const auto& ev : jumps_)
      if (std::abs(ev.time - u) <= timeEps_) return &ev;
    return nullptr;
  }

  Value value(double t) const {
    long k = 0;
    double u = localTime(t, k);
    int j = density_.cellIndexAt(u);
    const auto& bp = density_.breakpoints();
    Value v = valueAtBreak_[j];
    if (u > bp[j]) {
      if (jumpAtBreak_[j] >= 0) v += jumps_[jumpAtBreak_[j]].post;
      v += density_.integrateCell(j, 0.0, u - bp[j]);
    }
    if (k != 0) v += increment_ * static_cast<double>(k);
    return v;
  }

  Value deltaPre(double t) const {
    long k = 0;
    double u = localTime(t, k);
    const JumpEvent<Value>* ev = jumpAtLocal(u);
    return ev ? ev->pre : density_.zeroValue();
  }

  Value deltaPost(double t) const {
    long k = 0;
    double u = localTime(t, k);
    const JumpEvent<Value>* ev = jumpAtLocal(u);
    return ev ? ev->post : density_.zeroValue();
  }

  // Point value at breakpoint j of the base period.
  const Value& valueAtBreakpoint(std::size_t j) const { return valueAtBreak_[j]; }

 private:
  PiecewisePoly<Value> density_;
  std::vector<JumpEvent<Value>> jumps_;
  Value base_;
  double omega_ = 0.0;
  double timeEps_ = 0.0;
  std::vector<int> jumpAtBreak_;
  std::vector<Value> valueAtBreak_;
  Value increment_;
};

using BVMatrixFunction = PeriodicBVFunction<Eigen::MatrixXd>;
using RegulatedVectorFunction = PeriodicBVFunction<Eigen::VectorXd>;
using MatrixJump = JumpEvent<Eigen::MatrixXd>;
using VectorJump = JumpEvent<Eigen::VectorXd>;

template <class Value>
struct OneSidedValues {
  Value left;
  Value value;
  Value right;
};

// F(t-), F(t), F(t+).
template <class Value>
OneSidedValues<Value> one_sided_values(const PeriodicBVFunction<Value>& F, double t) {
  Value v = F.value(t);
  return {v - F.deltaPre(t), v, v + F.deltaPost(t)};
}

// Calls fn(absoluteTime, jump) for every periodic copy of a jump whose
// absolute time lies in [lo - slack, hi + slack], in increasing time order.
template <class Value, class Fn>
void for_each_jump_in(const PeriodicBVFunction<Value>& F, double lo, double hi, double slack,
                      Fn&& fn) {
  if (F.jumps().empty() || hi < lo) return;
  double omega = F.period();
  long kmin = static_cast<long>(std::floor(lo / omega)) - 1;
  long kmax = static_cast<long>(std::floor(hi / omega)) + 1;
  for (long k = kmin; k <= kmax; ++k)
    for (const auto& ev : F.jumps()) {
      double t = ev.time + static_cast<double>(k) * omega;
      if (t >= lo - slack && t <= hi + slack) fn(t, ev);
    }
}

}  // namespace glde
