#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "glde/bv_function.hpp"

namespace glde {

// Jump factor I - (A(t) - A(t-)) or I + (A(t+) - A(t)) is (numerically) singular.
class h_violation_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 1 is a Floquet multiplier, so no unique periodic response exists.
class resonance_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed system description (JSON or programmatic).
class config_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HCheckEntry {
  double time;     // jump time in [0, period)
  double detPre;   // det(I - (A(t) - A(t-)))
  double detPost;  // det(I + (A(t+) - A(t)))
};

struct HCheckReport {
  bool pass = true;
  double minAbsDet = 1.0;
  std::vector<HCheckEntry> entries;
};

// Verifies that both one-sided jump factors are invertible at every jump,
// with |det| > eps as the numerical test.
inline HCheckReport check_H(const BVMatrixFunction& A, double eps = 1e-12) {
  HCheckReport rep;
  Eigen::Index n = A.rows();
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  for (const auto& ev : A.jumps()) {
    double dPre = (I - ev.pre).determinant();
    double dPost = (I + ev.post).determinant();
    rep.entries.push_back({ev.time, dPre, dPost});
    rep.minAbsDet = std::min({rep.minAbsDet, std::abs(dPre), std::abs(dPost)});
    if (std::abs(dPre) <= eps || std::abs(dPost) <= eps) rep.pass = false;
  }
  return rep;
}

// One combined jump event of the pair (A, f), with the factors and inverses
// used by propagation. preFactor = I - dPreA, postFactor = I + dPostA.
struct SystemJump {
  double time;
  Eigen::MatrixXd preA, postA;
  Eigen::VectorXd preF, postF;
  Eigen::MatrixXd preFactor, postFactor;
  Eigen::MatrixXd preInv, postInv;
};

// A generalized linear differential equation dx = D[A x + f] with
// periodic-increment coefficient A and regulated forcing f, both described
// over one period. Immutable after construction; construction fails when the
// jump factors of A are not invertible.
class GLDESystem {
 public:
  explicit GLDESystem(BVMatrixFunction A, std::optional<RegulatedVectorFunction> f = std::nullopt,
                      double epsH = 1e-12)
      : A_(std::move(A)), f_(std::move(f)) {
    if (A_.rows() != A_.cols()) throw config_error("system: A must be square");
    if (f_) {
      if (f_->rows() != A_.rows()) throw config_error("system: A and f dimension mismatch");
      if (std::abs(f_->period() - A_.period()) > 1e-12 * A_.period())
        throw config_error("system: A and f period mismatch");
    }
    hReport_ = check_H(A_, epsH);
    if (!hReport_.pass) {
      std::ostringstream os;
      os << "system: jump factor singular (min |det| = " << hReport_.minAbsDet << ")";
      throw h_violation_error(os.str());
    }
    buildEvents();
  }

  Eigen::Index dimension() const { return A_.rows(); }
  double period() const { return A_.period(); }
  double timeTolerance() const { return A_.timeTolerance(); }
  const BVMatrixFunction& A() const { return A_; }
  bool hasForcing() const { return f_.has_value(); }
  const RegulatedVectorFunction& f() const {
    if (!f_) throw std::logic_error("system: no forcing");
    return *f_;
  }
  const HCheckReport& hReport() const { return hReport_; }

  // Union of both density meshes over [0, period]; propagation never steps
  // across one of these times.
  const std::vector<double>& eventTimes() const { return events_; }
  const std::vector<SystemJump>& jumps() const { return jumps_; }

  // Combined jump at local time u in [0, period]; u == period wraps to 0.
  const SystemJump* jumpAtLocal(double u) const {
    double eps = A_.timeTolerance();
    if (u >= A_.period() - eps) u = 0.0;
    for (const auto& j : jumps_)
      if (std::abs(j.time - u) <= eps) return &j;
    return nullptr;
  }

  Eigen::MatrixXd densityA(double t) const { return densityValue(A_, t); }
  Eigen::VectorXd densityF(double t) const {
    if (!f_) return Eigen::VectorXd::Zero(A_.rows());
    return densityValue(*f_, t);
  }

 private:
  template <class Value>
  static Value densityValue(const PeriodicBVFunction<Value>& F, double t) {
    long k = 0;
    double u = F.localTime(t, k);
    int j = F.density().cellIndexAt(u);
    return F.density().evalLocal(j, u - F.density().breakpoints()[j]);
  }

  void buildEvents() {
    double eps = A_.timeTolerance();
    events_ = A_.density().breakpoints();
    if (f_) {
      for (double x : f_->density().breakpoints()) {
        auto it = std::lower_bound(events_.begin(), events_.end(), x - eps);
        if (it == events_.end() || std::abs(*it - x) > eps) events_.insert(it, x);
      }
    }

    Eigen::Index n = A_.rows();
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    std::vector<double> jumpTimes;
    for (const auto& ev : A_.jumps()) jumpTimes.push_back(ev.time);
    if (f_)
      for (const auto& ev : f_->jumps()) {
        bool seen = false;
        for (double t : jumpTimes) seen = seen || std::abs(t - ev.time) <= eps;
        if (!seen) jumpTimes.push_back(ev.time);
      }
    std::sort(jumpTimes.begin(), jumpTimes.end());
    for (double t : jumpTimes) {
      SystemJump j;
      j.time = t;
      const MatrixJump* ja = A_.jumpAtLocal(t);
      j.preA = ja ? ja->pre : Eigen::MatrixXd::Zero(n, n);
      j.postA = ja ? ja->post : Eigen::MatrixXd::Zero(n, n);
      const VectorJump* jf = (f_ ? f_->jumpAtLocal(t) : nullptr);
      j.preF = jf ? jf->pre : Eigen::VectorXd::Zero(n);
      j.postF = jf ? jf->post : Eigen::VectorXd::Zero(n);
      j.preFactor = I - j.preA;
      j.postFactor = I + j.postA;
      j.preInv = j.preFactor.inverse();
      j.postInv = j.postFactor.inverse();
      jumps_.push_back(std::move(j));
    }
  }

  BVMatrixFunction A_;
  std::optional<RegulatedVectorFunction> f_;
  HCheckReport hReport_;
  std::vector<double> events_;
  std::vector<SystemJump> jumps_;
};

}  // namespace glde
