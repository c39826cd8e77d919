#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace glde {

// Degree cap for cell polynomials. Products of two cell polynomials (degree
// <= 10) are still integrated exactly by the closed-form routines.
inline constexpr int kMaxPolyDegree = 5;

// Coefficients of p(v + d) given those of p(u); exact Taylor shift.
template <class Value>
std::vector<Value> shift_poly_coeffs(const std::vector<Value>& c, double d) {
  int m = static_cast<int>(c.size());
  std::vector<Value> out;
  out.reserve(m);
  for (int k = 0; k < m; ++k) {
    Value acc = (c[k] - c[k]).eval();
    double binom = 1.0, dpow = 1.0;
    for (int i = k; i < m; ++i) {
      acc += c[i] * (binom * dpow);
      binom = binom * (i + 1) / (i + 1 - k);
      dpow *= d;
    }
    out.push_back(std::move(acc));
  }
  return out;
}

// Piecewise polynomial on [breakpoints.front(), breakpoints.back()].
// Cell j carries coefficients in the local variable u = t - breakpoints[j],
// i.e. value(t) = sum_k coeffs[j][k] * u^k. Value is an Eigen matrix or
// vector type; all coefficients must share its dimensions.
template <class Value>
class PiecewisePoly {
 public:
  PiecewisePoly() = default;

  PiecewisePoly(std::vector<double> breakpoints,
                std::vector<std::vector<Value>> cells)
      : bp_(std::move(breakpoints)), cells_(std::move(cells)) {
    if (bp_.size() < 2) throw std::invalid_argument("piecewise poly: need at least two breakpoints");
    for (std::size_t j = 0; j + 1 < bp_.size(); ++j) {
      if (!(bp_[j] < bp_[j + 1])) throw std::invalid_argument("piecewise poly: breakpoints must increase strictly");
    }
    if (cells_.size() != bp_.size() - 1) throw std::invalid_argument("piecewise poly: cell count must match breakpoints");
    for (const auto& c : cells_) {
      if (c.empty()) throw std::invalid_argument("piecewise poly: empty coefficient list");
      if (static_cast<int>(c.size()) > kMaxPolyDegree + 1) throw std::invalid_argument("piecewise poly: degree cap exceeded");
    }
    zero_ = cells_[0][0] - cells_[0][0];
    for (const auto& c : cells_)
      for (const auto& v : c)
        if (v.rows() != zero_.rows() || v.cols() != zero_.cols())
          throw std::invalid_argument("piecewise poly: inconsistent coefficient dimensions");
  }

  int cellCount() const { return static_cast<int>(cells_.size()); }
  const std::vector<double>& breakpoints() const { return bp_; }
  double domainStart() const { return bp_.front(); }
  double domainEnd() const { return bp_.back(); }
  const std::vector<Value>& coeffs(int cell) const { return cells_[cell]; }
  const Value& zeroValue() const { return zero_; }

  // Cell index whose half-open interval [bp_j, bp_{j+1}) contains t; the last
  // cell also owns t == domainEnd().
  int cellIndexAt(double t) const {
    if (t < bp_.front() || t > bp_.back()) throw std::out_of_range("piecewise poly: time outside domain");
    auto it = std::upper_bound(bp_.begin(), bp_.end(), t);
    int j = static_cast<int>(it - bp_.begin()) - 1;
    if (j < 0) j = 0;
    if (j >= cellCount()) j = cellCount() - 1;
    return j;
  }

  Value evalLocal(int cell, double u) const {
    const auto& c = cells_[cell];
    Value r = c.back();
    for (int k = static_cast<int>(c.size()) - 2; k >= 0; --k) r = (r * u + c[k]).eval();
    return r;
  }

  Value evalAt(double t) const {
    int j = cellIndexAt(t);
    return evalLocal(j, t - bp_[j]);
  }

  // Exact integral of cell polynomial over local offsets [u0, u1].
  Value integrateCell(int cell, double u0, double u1) const {
    const auto& c = cells_[cell];
    auto primitive = [&](double u) {
      Value r = (c.back() / static_cast<double>(c.size())).eval();
      for (int k = static_cast<int>(c.size()) - 2; k >= 0; --k) r = (r * u + c[k] / (k + 1.0)).eval();
      return (r * u).eval();
    };
    return primitive(u1) - primitive(u0);
  }

  // Exact integral over [a, b] inside the domain; a reversed range negates.
  Value integrate(double a, double b) const {
    if (b < a) return -integrate(b, a);
    Value acc = zero_;
    int ja = cellIndexAt(a), jb = cellIndexAt(b);
    for (int j = ja; j <= jb; ++j) {
      double lo = (j == ja) ? a : bp_[j];
      double hi = (j == jb) ? b : bp_[j + 1];
      if (hi > lo) acc += integrateCell(j, lo - bp_[j], hi - bp_[j]);
    }
    return acc;
  }

  // Splits the containing cell at t (no-op when t is already a breakpoint to
  // within eps). The right piece's coefficients come from an exact Taylor
  // shift, so values are unchanged.
  void insertBreakpoint(double t, double eps) {
    for (double b : bp_)
      if (std::abs(t - b) <= eps) return;
    if (t < bp_.front() || t > bp_.back()) throw std::out_of_range("piecewise poly: breakpoint outside domain");
    int j = cellIndexAt(t);
    std::vector<Value> right = shift_poly_coeffs(cells_[j], t - bp_[j]);
    bp_.insert(bp_.begin() + j + 1, t);
    cells_.insert(cells_.begin() + j + 1, std::move(right));
  }

  int maxDegree() const {
    int d = 0;
    for (const auto& c : cells_) d = std::max(d, static_cast<int>(c.size()) - 1);
    return d;
  }

 private:
  std::vector<double> bp_;
  std::vector<std::vector<Value>> cells_;
  Value zero_;
};

}  // namespace glde
