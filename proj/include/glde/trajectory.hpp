#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "glde/bv_function.hpp"

namespace glde {

// Dense record of a piecewise-smooth path: cubic-Hermite node data on each
// smooth segment plus left/point/right values at jumps. Nodes at a jump or
// mesh boundary appear twice (once per side) so the interpolant always uses
// one-sided derivatives.
template <class Value>
class DensePath {
 public:
  struct JumpRecord {
    double time;
    Value left, value, right;
  };

  explicit DensePath(double timeEps = 1e-12) : eps_(timeEps) {}

  void addNode(double t, Value x, Value d) {
    t_.push_back(t);
    x_.push_back(std::move(x));
    d_.push_back(std::move(d));
  }

  void addJump(JumpRecord r) { jumps_.push_back(std::move(r)); }

  // Puts nodes in ascending time order (paths built backward arrive reversed).
  void finalize() {
    if (t_.size() >= 2 && t_.front() > t_.back()) {
      std::reverse(t_.begin(), t_.end());
      std::reverse(x_.begin(), x_.end());
      std::reverse(d_.begin(), d_.end());
    }
    std::sort(jumps_.begin(), jumps_.end(),
              [](const JumpRecord& a, const JumpRecord& b) { return a.time < b.time; });
  }

  bool empty() const { return t_.empty(); }
  double tMin() const { return t_.front(); }
  double tMax() const { return t_.back(); }
  const std::vector<double>& nodeTimes() const { return t_; }
  const std::vector<JumpRecord>& jumpRecords() const { return jumps_; }
  double timeTolerance() const { return eps_; }

  const JumpRecord* jumpAt(double t) const {
    auto it = std::lower_bound(jumps_.begin(), jumps_.end(), t - eps_,
                               [](const JumpRecord& r, double v) { return r.time < v; });
    if (it != jumps_.end() && std::abs(it->time - t) <= eps_) return &*it;
    return nullptr;
  }

  // Point value at t; jumps give the point value of the triple.
  Value evaluate(double t) const {
    if (const JumpRecord* r = jumpAt(t)) return r->value;
    return interpolate(t);
  }

  OneSidedValues<Value> oneSided(double t) const {
    if (const JumpRecord* r = jumpAt(t)) return {r->left, r->value, r->right};
    Value v = interpolate(t);
    return {v, v, v};
  }

 private:
  Value interpolate(double t) const {
    if (t_.empty()) throw std::logic_error("dense path: empty");
    if (t < t_.front() - eps_ || t > t_.back() + eps_)
      throw std::out_of_range("dense path: time outside stored range");
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i1 = static_cast<std::size_t>(it - t_.begin());
    if (i1 == 0) return x_.front();
    if (i1 == t_.size()) return x_.back();
    std::size_t i0 = i1 - 1;
    double h = t_[i1] - t_[i0];
    if (h <= eps_) return x_[i1];
    double th = (t - t_[i0]) / h;
    double t2 = th * th, t3 = t2 * th;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + th;
    double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * x_[i0] + (h10 * h) * d_[i0] + h01 * x_[i1] + (h11 * h) * d_[i1];
  }

  std::vector<double> t_;
  std::vector<Value> x_, d_;
  std::vector<JumpRecord> jumps_;
  double eps_;
};

using MatrixPath = DensePath<Eigen::MatrixXd>;

// Solution path of one initial value problem, with CSV-ready samples.
// Jump times contribute a left/point/right triple; smooth samples carry
// side 'P'.
class Trajectory {
 public:
  struct Sample {
    double t;
    char side;  // 'L', 'P' or 'R'
    Eigen::VectorXd x;
  };

  Trajectory(DensePath<Eigen::VectorXd> path, double initialTime, Eigen::VectorXd initialState,
             int sampleCount)
      : path_(std::move(path)), t0_(initialTime), x0_(std::move(initialState)) {
    buildSamples(sampleCount);
  }

  const DensePath<Eigen::VectorXd>& path() const { return path_; }
  double initialTime() const { return t0_; }
  const Eigen::VectorXd& initialState() const { return x0_; }
  double startTime() const { return path_.tMin(); }
  double endTime() const { return path_.tMax(); }
  const std::vector<Sample>& samples() const { return samples_; }

  Eigen::VectorXd evaluate(double t) const { return path_.evaluate(t); }
  OneSidedValues<Eigen::VectorXd> oneSided(double t) const { return path_.oneSided(t); }

 private:
  void buildSamples(int count) {
    if (count < 2) count = 2;
    double a = path_.tMin(), b = path_.tMax();
    double eps = path_.timeTolerance();
    std::vector<double> times;
    times.reserve(count);
    for (int i = 0; i < count; ++i)
      times.push_back(a + (b - a) * (static_cast<double>(i) / (count - 1)));
    samples_.clear();
    std::size_t nextJump = 0;
    const auto& jumps = path_.jumpRecords();
    auto emitJumpsBefore = [&](double t) {
      while (nextJump < jumps.size() && jumps[nextJump].time < t - eps) {
        const auto& r = jumps[nextJump++];
        samples_.push_back({r.time, 'L', r.left});
        samples_.push_back({r.time, 'P', r.value});
        samples_.push_back({r.time, 'R', r.right});
      }
    };
    for (double t : times) {
      emitJumpsBefore(t);
      if (nextJump < jumps.size() && std::abs(jumps[nextJump].time - t) <= eps) {
        const auto& r = jumps[nextJump++];
        samples_.push_back({r.time, 'L', r.left});
        samples_.push_back({r.time, 'P', r.value});
        samples_.push_back({r.time, 'R', r.right});
      } else {
        samples_.push_back({t, 'P', path_.evaluate(t)});
      }
    }
    emitJumpsBefore(b + 2 * eps);
  }

  DensePath<Eigen::VectorXd> path_;
  double t0_;
  Eigen::VectorXd x0_;
  std::vector<Sample> samples_;
};

}  // namespace glde
