#pragma once

// Feasibility predicates over the revealed environment. Points and
// segments are tested per robot in the workspace; the formation band and
// robot-to-robot links are the a-priori constraints.

#include <span>

#include "fpplan/config_space.hpp"
#include "fpplan/environment.hpp"

namespace fpplan {

/// Every robot of `x` inside the workspace and outside each listed primitive.
inline bool positions_clear(const Configuration& x, const GroundTruth& truth,
                            std::span<const std::size_t> ids) {
  const std::size_t wdim = truth.workspace_dim();
  for (std::size_t r = 0; r < truth.robots(); ++r) {
    const auto p = x.robot(r, wdim);
    if (!truth.workspace().contains(p)) return false;
    for (const auto id : ids) {
      if (truth.interior_contains(id, p)) return false;
    }
  }
  return true;
}

/// Link segment between every robot pair clear of the listed primitives.
inline bool links_clear(const Configuration& x, const GroundTruth& truth,
                        std::span<const std::size_t> ids, double sample_step) {
  const std::size_t wdim = truth.workspace_dim();
  for (std::size_t i = 0; i < truth.robots(); ++i) {
    for (std::size_t j = i + 1; j < truth.robots(); ++j) {
      for (const auto id : ids) {
        if (truth.segment_hits(id, x.robot(i, wdim), x.robot(j, wdim), sample_step)) return false;
      }
    }
  }
  return true;
}

inline bool band_satisfied(const Configuration& x, std::size_t robots, std::size_t wdim,
                           double dmin, double dmax) {
  for (std::size_t i = 0; i < robots; ++i) {
    for (std::size_t j = i + 1; j < robots; ++j) {
      const double d = distance(x.robot(i, wdim), x.robot(j, wdim));
      if (d < dmin || d > dmax) return false;
    }
  }
  return true;
}

/// Simultaneous straight-line motion a -> b: each robot's workspace segment
/// stays clear of the listed primitives. Bounds are convex, so endpoint
/// containment covers the whole segment.
inline bool motion_clear(const Configuration& a, const Configuration& b, const GroundTruth& truth,
                         std::span<const std::size_t> ids, double sample_step) {
  const std::size_t wdim = truth.workspace_dim();
  for (std::size_t r = 0; r < truth.robots(); ++r) {
    const auto pa = a.robot(r, wdim);
    const auto pb = b.robot(r, wdim);
    if (!truth.workspace().contains(pa) || !truth.workspace().contains(pb)) return false;
    for (const auto id : ids) {
      if (truth.segment_hits(id, pa, pb, sample_step)) return false;
    }
  }
  return true;
}

/// Pairwise distance band plus unobstructed links against revealed primitives.
inline bool multi_robot_feasible(const Configuration& x, const KnownEnvironment& env, double dmin,
                                 double dmax) {
  const auto& truth = env.truth();
  check_same_dim(x.size(), truth.config_dim(), "multi_robot_feasible");
  return band_satisfied(x, truth.robots(), truth.workspace_dim(), dmin, dmax) &&
         links_clear(x, truth, env.revealed(), env.sample_step());
}

/// x violates no revealed primitive, lies in the workspace, and meets the
/// formation band when one is configured.
inline bool point_feasible(const Configuration& x, const KnownEnvironment& env) {
  const auto& truth = env.truth();
  check_same_dim(x.size(), truth.config_dim(), "point_feasible");
  if (!positions_clear(x, truth, env.revealed())) return false;
  if (truth.band() && truth.robots() > 1) {
    return multi_robot_feasible(x, env, truth.band()->dmin, truth.band()->dmax);
  }
  return true;
}

inline bool segment_feasible(const Configuration& a, const Configuration& b,
                             const KnownEnvironment& env) {
  check_same_dim(a.size(), b.size(), "segment_feasible");
  check_same_dim(a.size(), env.truth().config_dim(), "segment_feasible");
  return motion_clear(a, b, env.truth(), env.revealed(), env.sample_step());
}

}  // namespace fpplan
