#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "laxhopf/errors.hpp"

namespace laxhopf {

using Vec = std::vector<double>;
using VecView = std::span<const double>;

inline double dot(VecView a, VecView b) {
  if (a.size() != b.size()) throw MisuseError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(VecView a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(VecView a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Closed interval per coordinate; infinite ends allowed.
struct Interval {
  double lo = -INFINITY;
  double hi = INFINITY;

  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
  bool bounded() const noexcept { return std::isfinite(lo) && std::isfinite(hi); }
};

using Box = std::vector<Interval>;

inline bool box_contains(const Box& box, VecView u) {
  if (box.empty()) return true;
  if (box.size() != u.size()) throw MisuseError("box: dimension mismatch");
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!box[i].contains(u[i])) return false;
  return true;
}

/// Regular lattice lo + k*step, k = 0..count-1, per coordinate.
class Lattice {
 public:
  struct Axis {
    double lo = 0.0;
    double step = 1.0;
    std::size_t count = 1;
    double at(std::size_t k) const { return lo + static_cast<double>(k) * step; }
    double hi() const { return at(count - 1); }
  };

  Lattice() = default;
  explicit Lattice(std::vector<Axis> axes);

  // Axis covering [lo, hi] with the given step; hi is included when it lies on
  // the lattice up to rounding.
  static Axis make_axis(double lo, double hi, double step);
  static Lattice uniform(const Vec& lo, const Vec& hi, const Vec& step);

  std::size_t dimension() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  const std::vector<Axis>& axes() const noexcept { return axes_; }

  // Row-major multi-index, last coordinate fastest.
  Vec point(std::size_t flat) const;
  void point(std::size_t flat, std::span<double> out) const;

 private:
  std::vector<Axis> axes_;
  std::size_t size_ = 0;
};

}  // namespace laxhopf
