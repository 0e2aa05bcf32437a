#pragma once

// Ground truth world and the incrementally revealed view the planner sees.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpplan/config_space.hpp"
#include "fpplan/error.hpp"

namespace fpplan {

/// Implicit constraint given as a signed distance in the workspace:
/// negative inside the obstacle, positive outside. Only functions that are
/// 1-Lipschitz give exact sensing and clearance values.
struct ImplicitConstraint {
  std::function<double(std::span<const double>)> signed_distance;
  std::string label;
};

enum class PrimitiveKind { box, implicit };

struct ObstaclePrimitive {
  PrimitiveKind kind = PrimitiveKind::box;
  Box box;
  std::size_t implicit_index = 0;  // into GroundTruth::implicits()
  bool known = false;              // revealed before planning starts

  static ObstaclePrimitive make_box(Box b, bool known = false) {
    ObstaclePrimitive p;
    p.kind = PrimitiveKind::box;
    p.box = std::move(b);
    p.known = known;
    return p;
  }
  static ObstaclePrimitive make_implicit(std::size_t index, bool known = false) {
    ObstaclePrimitive p;
    p.kind = PrimitiveKind::implicit;
    p.implicit_index = index;
    p.known = known;
    return p;
  }
};

/// Pairwise robot distance band, an a-priori constraint.
struct FormationBand {
  double dmin = 0.0;
  double dmax = kInf;
};

/// Immutable world description.
class GroundTruth {
 public:
  GroundTruth(Workspace workspace, std::vector<ObstaclePrimitive> primitives,
              std::size_t robots = 1, std::optional<FormationBand> band = std::nullopt,
              std::vector<ImplicitConstraint> implicits = {})
      : workspace_(std::move(workspace)),
        primitives_(std::move(primitives)),
        implicits_(std::move(implicits)),
        robots_(robots),
        band_(band) {
    require(workspace_.dim() > 0 && workspace_.lo.size() == workspace_.hi.size(),
            ErrorKind::validation, "workspace bounds malformed");
    require(robots_ >= 1, ErrorKind::validation, "need at least one robot");
    for (const auto& p : primitives_) {
      if (p.kind == PrimitiveKind::box) {
        require(p.box.well_formed() && p.box.dim() == workspace_.dim(), ErrorKind::validation,
                "box primitive malformed or of wrong dimension");
      } else {
        require(p.implicit_index < implicits_.size(), ErrorKind::validation,
                "implicit primitive references unknown constraint");
      }
    }
    if (band_) {
      require(band_->dmin < band_->dmax, ErrorKind::validation, "distance band needs dmin < dmax");
    }
  }

  const Workspace& workspace() const noexcept { return workspace_; }
  std::size_t workspace_dim() const noexcept { return workspace_.dim(); }
  std::size_t robots() const noexcept { return robots_; }
  std::size_t config_dim() const noexcept { return robots_ * workspace_.dim(); }
  const std::vector<ObstaclePrimitive>& primitives() const noexcept { return primitives_; }
  const std::vector<ImplicitConstraint>& implicits() const noexcept { return implicits_; }
  const std::optional<FormationBand>& band() const noexcept { return band_; }

  /// Workspace distance from `p` to primitive `id` (0 inside).
  double distance_to(std::size_t id, std::span<const double> p) const {
    const auto& prim = primitives_[id];
    if (prim.kind == PrimitiveKind::box) return box_distance(prim.box, p);
    return std::max(0.0, implicits_[prim.implicit_index].signed_distance(p));
  }

  bool interior_contains(std::size_t id, std::span<const double> p) const {
    const auto& prim = primitives_[id];
    if (prim.kind == PrimitiveKind::box) return box_interior_contains(prim.box, p);
    return implicits_[prim.implicit_index].signed_distance(p) < -kBoundaryEps;
  }

  /// Whether workspace segment [a, b] enters primitive `id`. Exact for boxes,
  /// sampled at `sample_step` for implicit constraints.
  bool segment_hits(std::size_t id, std::span<const double> a, std::span<const double> b,
                    double sample_step) const {
    const auto& prim = primitives_[id];
    if (prim.kind == PrimitiveKind::box) return segment_hits_box(prim.box, a, b);
    const double len = distance(a, b);
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / sample_step)));
    std::vector<double> p(a.size());
    for (std::size_t s = 0; s <= steps; ++s) {
      const double t = static_cast<double>(s) / static_cast<double>(steps);
      for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] + t * (b[i] - a[i]);
      if (interior_contains(id, p)) return true;
    }
    return false;
  }

  /// Distance between workspace segment [a, b] and primitive `id`.
  double segment_distance(std::size_t id, std::span<const double> a, std::span<const double> b,
                          double sample_step) const {
    const auto& prim = primitives_[id];
    if (prim.kind == PrimitiveKind::box) return segment_box_distance(prim.box, a, b);
    const double len = distance(a, b);
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / sample_step)));
    std::vector<double> p(a.size());
    double best = kInf;
    for (std::size_t s = 0; s <= steps; ++s) {
      const double t = static_cast<double>(s) / static_cast<double>(steps);
      for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] + t * (b[i] - a[i]);
      best = std::min(best, distance_to(id, p));
    }
    return best;
  }

 private:
  Workspace workspace_;
  std::vector<ObstaclePrimitive> primitives_;
  std::vector<ImplicitConstraint> implicits_;
  std::size_t robots_;
  std::optional<FormationBand> band_;
};

/// The revealed subset of the ground truth plus the sensing radius.
/// Revelation is whole-primitive and monotone.
class KnownEnvironment {
 public:
  KnownEnvironment(std::shared_ptr<const GroundTruth> truth, double sensing_radius,
                   double sample_step = 1e-3)
      : truth_(std::move(truth)),
        flags_(truth_->primitives().size(), 0),
        sensing_radius_(sensing_radius),
        sample_step_(sample_step) {
    require(sensing_radius_ > 0.0, ErrorKind::validation, "sensing radius must be positive");
    require(sample_step_ > 0.0, ErrorKind::validation, "sample step must be positive");
    for (std::size_t id = 0; id < truth_->primitives().size(); ++id) {
      if (truth_->primitives()[id].known) reveal(id);
    }
  }

  /// Everything revealed; used for ground-truth audits and known-map runs.
  static KnownEnvironment omniscient(std::shared_ptr<const GroundTruth> truth,
                                     double sensing_radius = 1.0, double sample_step = 1e-3) {
    KnownEnvironment env(std::move(truth), sensing_radius, sample_step);
    for (std::size_t id = 0; id < env.flags_.size(); ++id) env.reveal(id);
    return env;
  }

  const GroundTruth& truth() const noexcept { return *truth_; }
  const std::shared_ptr<const GroundTruth>& truth_ptr() const noexcept { return truth_; }
  double sensing_radius() const noexcept { return sensing_radius_; }
  double sample_step() const noexcept { return sample_step_; }
  void set_sample_step(double s) {
    require(s > 0.0, ErrorKind::validation, "sample step must be positive");
    sample_step_ = s;
  }

  bool is_revealed(std::size_t id) const { return flags_.at(id) != 0; }
  /// Revealed primitive ids in order of revelation.
  const std::vector<std::size_t>& revealed() const noexcept { return order_; }

  /// Reveal every primitive within the sensing radius of any robot in `x`.
  /// Returns the ids that were newly revealed.
  std::vector<std::size_t> reveal_near(const Configuration& x) {
    check_same_dim(x.size(), truth_->config_dim(), "sense");
    std::vector<std::size_t> fresh;
    const std::size_t wdim = truth_->workspace_dim();
    for (std::size_t id = 0; id < flags_.size(); ++id) {
      if (flags_[id]) continue;
      for (std::size_t r = 0; r < truth_->robots(); ++r) {
        if (truth_->distance_to(id, x.robot(r, wdim)) <= sensing_radius_) {
          reveal(id);
          fresh.push_back(id);
          break;
        }
      }
    }
    return fresh;
  }

 private:
  void reveal(std::size_t id) {
    if (flags_[id]) return;
    flags_[id] = 1;
    order_.push_back(id);
  }

  std::shared_ptr<const GroundTruth> truth_;
  std::vector<char> flags_;
  std::vector<std::size_t> order_;
  double sensing_radius_;
  double sample_step_;
};

inline KnownEnvironment sense(KnownEnvironment known, const Configuration& x) {
  known.reveal_near(x);
  return known;
}

/// Minimum workspace distance from any robot in `x` to the given primitives.
inline double distance_to_primitives(const Configuration& x, const GroundTruth& truth,
                                     std::span<const std::size_t> ids) {
  double best = kInf;
  const std::size_t wdim = truth.workspace_dim();
  for (const auto id : ids) {
    for (std::size_t r = 0; r < truth.robots(); ++r) {
      best = std::min(best, truth.distance_to(id, x.robot(r, wdim)));
    }
  }
  return best;
}

/// Distance from the nearest robot to the nearest revealed primitive; +inf
/// when nothing is revealed.
inline double distance_to_revealed(const Configuration& x, const KnownEnvironment& known) {
  return distance_to_primitives(x, known.truth(), known.revealed());
}

}  // namespace fpplan
