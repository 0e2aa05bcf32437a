#pragma once

// Configuration-space geometry: points, distances, the distance-to-target
// potential, and exact box primitives in the workspace.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpplan/error.hpp"

namespace fpplan {

/// Interior tests treat a point as inside an open set only when it clears
/// the boundary by this margin. Lattice coordinates carry ~1e-16 noise, so
/// an edge that grazes a face must not flip to "penetrating".
inline constexpr double kBoundaryEps = 1e-12;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A point of the n-dimensional configuration space. For k robots in a
/// d-dimensional workspace, n = k*d and coordinates are stacked per robot.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::size_t n, double fill = 0.0) : coords_(n, fill) {}
  explicit Configuration(std::vector<double> coords) : coords_(std::move(coords)) {}
  Configuration(std::initializer_list<double> coords) : coords_(coords) {}

  std::size_t size() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }

  std::span<const double> coords() const noexcept { return coords_; }
  const std::vector<double>& values() const noexcept { return coords_; }

  /// Workspace position of robot `r` when each robot owns `wdim` coordinates.
  std::span<const double> robot(std::size_t r, std::size_t wdim) const {
    return std::span<const double>(coords_).subspan(r * wdim, wdim);
  }

  auto begin() const noexcept { return coords_.begin(); }
  auto end() const noexcept { return coords_.end(); }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<double> coords_;
};

inline void check_same_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    fail(ErrorKind::dimension_mismatch,
         std::string(where) + ": dimension mismatch (" + std::to_string(a) +
             " vs " + std::to_string(b) + ")");
  }
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  check_same_dim(a.size(), b.size(), "distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double distance(const Configuration& a, const Configuration& b) {
  return distance(a.coords(), b.coords());
}

/// Point on segment [a, b] at parameter t.
inline Configuration lerp(const Configuration& a, const Configuration& b, double t) {
  check_same_dim(a.size(), b.size(), "lerp");
  Configuration out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
  return out;
}

/// p(x) = |x - target|: convex, zero only at the target.
class PotentialField {
 public:
  PotentialField() = default;
  explicit PotentialField(Configuration target) : target_(std::move(target)) {}

  const Configuration& target() const noexcept { return target_; }

  double operator()(const Configuration& x) const { return distance(x, target_); }
  double operator()(std::span<const double> x) const {
    return distance(x, target_.coords());
  }

  /// Analytic gradient (x - t)/|x - t|; zero vector at the target itself.
  std::vector<double> gradient(std::span<const double> x) const {
    check_same_dim(x.size(), target_.size(), "gradient");
    std::vector<double> g(x.size());
    const double r = distance(x, target_.coords());
    if (r == 0.0) return g;
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = (x[i] - target_[i]) / r;
    return g;
  }

 private:
  Configuration target_;
};

inline double potential(const PotentialField& field, const Configuration& x) {
  return field(x);
}

/// Axis-aligned box [lo, hi] in workspace coordinates. The obstacle it
/// models is the open interior; the faces are free space.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const noexcept { return lo.size(); }

  bool well_formed() const {
    if (lo.size() != hi.size() || lo.empty()) return false;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (!(lo[i] <= hi[i])) return false;
    }
    return true;
  }
};

inline bool box_interior_contains(const Box& box, std::span<const double> p) {
  for (std::size_t i = 0; i < box.dim(); ++i) {
    if (!(p[i] > box.lo[i] + kBoundaryEps && p[i] < box.hi[i] - kBoundaryEps)) return false;
  }
  return true;
}

/// Euclidean distance from p to the closed box (0 when inside).
inline double box_distance(const Box& box, std::span<const double> p) {
  double s = 0.0;
  for (std::size_t i = 0; i < box.dim(); ++i) {
    double d = 0.0;
    if (p[i] < box.lo[i]) {
      d = box.lo[i] - p[i];
    } else if (p[i] > box.hi[i]) {
      d = p[i] - box.hi[i];
    }
    s += d * d;
  }
  return std::sqrt(s);
}

/// Parameter interval of [a, b] lying in the open interior of `box`, as
/// (t_enter, t_exit) clipped to [0, 1]. Empty when t_enter >= t_exit.
/// Slab test with the same boundary margin as box_interior_contains.
inline std::pair<double, double> segment_box_overlap(const Box& box,
                                                     std::span<const double> a,
                                                     std::span<const double> b) {
  double t0 = 0.0;
  double t1 = 1.0;
  for (std::size_t i = 0; i < box.dim(); ++i) {
    const double lo = box.lo[i] + kBoundaryEps;
    const double hi = box.hi[i] - kBoundaryEps;
    const double d = b[i] - a[i];
    if (d == 0.0) {
      if (!(a[i] > lo && a[i] < hi)) return {1.0, 0.0};
      continue;
    }
    double ta = (lo - a[i]) / d;
    double tb = (hi - a[i]) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (!(t0 < t1)) return {1.0, 0.0};
  }
  return {t0, t1};
}

inline bool segment_hits_box(const Box& box, std::span<const double> a,
                             std::span<const double> b) {
  const auto [t0, t1] = segment_box_overlap(box, a, b);
  return t0 < t1;
}

/// Distance between segment [a, b] and a closed box. Convex in the segment
/// parameter, so ternary search converges to the minimum.
inline double segment_box_distance(const Box& box, std::span<const double> a,
                                   std::span<const double> b) {
  if (segment_hits_box(box, a, b)) return 0.0;
  std::vector<double> p(a.size());
  auto at = [&](double t) {
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] + t * (b[i] - a[i]);
    return box_distance(box, p);
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (at(m1) <= at(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::min({at(0.0), at(1.0), at(0.5 * (lo + hi))});
}

/// Workspace bounds. Positions on the boundary are feasible.
struct Workspace {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const noexcept { return lo.size(); }

  bool contains(std::span<const double> p) const {
    for (std::size_t i = 0; i < dim(); ++i) {
      if (p[i] < lo[i] - kBoundaryEps || p[i] > hi[i] + kBoundaryEps) return false;
    }
    return true;
  }

  static Workspace unit(std::size_t dim) {
    return Workspace{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
  }
};

}  // namespace fpplan
