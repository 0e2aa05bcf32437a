#pragma once

// Replanning loop: grow a graph on what is known, follow its path while
// sensing, stop short of newly revealed blockers, repeat.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpplan/environment.hpp"
#include "fpplan/error.hpp"
#include "fpplan/feasibility.hpp"
#include "fpplan/graph_gen.hpp"
#include "fpplan/path_find.hpp"
#include "fpplan/search_graph.hpp"
#include "fpplan/trap_escape.hpp"

namespace fpplan {

struct PlannerConfig {
  GenConfig gen;
  TrapEscapePolicy escape;
  double sensing_radius = 0.06;
  double stop_fraction = 0.5;
  /// Motion sampling step; non-positive means gen.step / 10.
  double motion_step = 0.0;
  /// Graph-generation rounds allowed; 0 means four times the lattice
  /// capacity of the workspace.
  std::size_t max_iterations = 0;
  /// Stop only on lattice vertices of the current path.
  bool snap_stops_to_lattice = false;

  double delta() const { return motion_step > 0.0 ? motion_step : gen.step / 10.0; }

  void validate(std::size_t n) const {
    gen.validate(n);
    require(sensing_radius > 0.0, ErrorKind::validation, "sensing_radius must be positive");
    require(stop_fraction > 0.0 && stop_fraction < 1.0, ErrorKind::validation,
            "stop_fraction must lie in (0, 1)");
    require(sensing_radius > delta(), ErrorKind::validation,
            "sensing_radius must exceed the motion step");
  }
};

enum class MotionStatus { reached_target, blocked, exhausted };

inline const char* to_string(MotionStatus s) {
  switch (s) {
    case MotionStatus::reached_target: return "reached-target";
    case MotionStatus::blocked: return "blocked";
    case MotionStatus::exhausted: return "exhausted";
  }
  return "?";
}

/// `exhausted` is a blocked stop where no sample before the block met the
/// clearance rule; the robot halts where the blocker was first seen.
struct MotionOutcome {
  std::vector<Configuration> traversed;
  MotionStatus status = MotionStatus::reached_target;
  Configuration stop_point;
  double stop_clearance = kInf;     // to the primitives that blocked the path
  double nearest_clearance = kInf;  // to any revealed primitive
  std::vector<std::size_t> blockers;
  std::vector<std::size_t> revealed;  // newly revealed while moving
};

namespace detail {

// Polyline resampled with equal steps of at most `delta` per edge. Records
// the sample index of each path vertex.
struct Samples {
  std::vector<Configuration> pts;
  std::vector<std::size_t> vertex_index;
};

inline Samples resample(const std::vector<Configuration>& poly, double delta) {
  Samples s;
  s.pts.push_back(poly.front());
  s.vertex_index.push_back(0);
  for (std::size_t e = 1; e < poly.size(); ++e) {
    const double len = distance(poly[e - 1], poly[e]);
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / delta - 1e-9)));
    for (std::size_t k = 1; k <= steps; ++k) {
      s.pts.push_back(k == steps ? poly[e] : lerp(poly[e - 1], poly[e], static_cast<double>(k) / static_cast<double>(steps)));
    }
    s.vertex_index.push_back(s.pts.size() - 1);
  }
  return s;
}

}  // namespace detail

/// Follows `poly` from its first point, sensing at every sample. When the
/// untraversed remainder meets a newly revealed primitive, the robot stops
/// at the last sample before the first blocked step whose clearance to the
/// blocking primitives lies in [stop_fraction*R, R].
inline MotionOutcome move_along(const std::vector<Configuration>& poly, KnownEnvironment& known,
                                const PlannerConfig& cfg) {
  require(!poly.empty(), ErrorKind::invalid_argument, "empty path");
  const auto& truth = known.truth();
  const auto s = detail::resample(poly, cfg.delta());
  const std::size_t last = s.pts.size() - 1;
  const double R = known.sensing_radius();
  const double want = cfg.stop_fraction * R;

  MotionOutcome out;
  std::size_t block_idx = std::numeric_limits<std::size_t>::max();
  std::optional<std::size_t> stop_idx;
  bool exhausted = false;
  std::size_t i = 0;
  out.traversed.push_back(s.pts[0]);

  auto clearance = [&](std::size_t k) { return distance_to_primitives(s.pts[k], truth, out.blockers); };

  auto choose_stop = [&] {
    exhausted = false;
    if (cfg.snap_stops_to_lattice) {
      std::size_t best = 0;
      std::optional<std::size_t> clear;
      for (const auto vi : s.vertex_index) {
        if (vi > block_idx) break;
        best = vi;
        if (clearance(vi) >= want) clear = vi;
      }
      return clear ? *clear : best;
    }
    std::optional<std::size_t> in_band;
    std::optional<std::size_t> above;
    for (std::size_t k = i; k <= block_idx && k <= last; ++k) {
      const double c = clearance(k);
      if (c >= want && c <= R) in_band = k;
      if (c >= want) above = k;
    }
    if (in_band) return *in_band;
    if (above) return *above;
    exhausted = true;
    return i;
  };

  while (true) {
    const auto fresh = known.reveal_near(s.pts[i]);
    if (!fresh.empty()) {
      out.revealed.insert(out.revealed.end(), fresh.begin(), fresh.end());
      if (!point_feasible(s.pts[i], known)) {
        fail(ErrorKind::model_violation, "robot found inside a newly revealed obstacle");
      }
      bool new_block = false;
      for (const auto id : fresh) {
        const std::size_t ids[1] = {id};
        for (std::size_t j = i; j < last; ++j) {
          if (!motion_clear(s.pts[j], s.pts[j + 1], truth, ids, known.sample_step())) {
            out.blockers.push_back(id);
            block_idx = std::min(block_idx, j);
            new_block = true;
            break;
          }
        }
      }
      if (new_block) stop_idx = choose_stop();
    }
    if (stop_idx && *stop_idx <= i) break;
    if (i == last) break;
    ++i;
    out.traversed.push_back(s.pts[i]);
  }

  if (stop_idx && *stop_idx < i) {
    // Snapped stop behind the robot: retrace the samples back to it.
    for (std::size_t k = i; k-- > *stop_idx;) out.traversed.push_back(s.pts[k]);
    i = *stop_idx;
  }
  out.stop_point = s.pts[i];
  out.nearest_clearance = distance_to_revealed(out.stop_point, known);
  if (stop_idx) {
    out.status = exhausted ? MotionStatus::exhausted : MotionStatus::blocked;
    out.stop_clearance = distance_to_primitives(out.stop_point, truth, out.blockers);
  } else {
    out.status = MotionStatus::reached_target;
  }
  return out;
}

enum class PlanStatus { success, no_feasible_path, resource_limit };

inline const char* to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::success: return "success";
    case PlanStatus::no_feasible_path: return "no-feasible-path";
    case PlanStatus::resource_limit: return "resource-limit";
  }
  return "?";
}

struct PlanSegment {
  Configuration start;
  std::size_t revealed_count = 0;  // primitives known when the graph was grown
  GraphOutcome graph;
  std::optional<GraphPath> path;
  std::optional<MotionOutcome> motion;
};

struct TrajectoryPoint {
  double t = 0.0;  // cumulative arc length
  std::size_t segment = 0;
  Configuration x;
};

struct PlanMetrics {
  std::size_t num_robots = 1;
  double step = 0.0;
  std::size_t dim = 0;
  double avg_vertices = 0.0;
  std::size_t max_vertices = 0;
  std::size_t total_vertices = 0;
  bool trapped = false;  // the largest graph met a local minimum
  std::size_t num_graphs = 0;
};

struct PlanResult {
  std::vector<PlanSegment> segments;
  std::vector<TrajectoryPoint> trajectory;
  PlanStatus status = PlanStatus::success;
  std::string message;
  double step = 0.0;
  std::shared_ptr<KnownEnvironment> known;  // final revealed state

  PlanMetrics metrics() const {
    PlanMetrics m;
    m.step = step;
    if (known) {
      m.num_robots = known->truth().robots();
      m.dim = known->truth().config_dim();
    }
    m.num_graphs = segments.size();
    std::size_t sum = 0;
    for (const auto& seg : segments) {
      const std::size_t v = seg.graph.graph.size();
      sum += v;
      if (v > m.max_vertices) {
        m.max_vertices = v;
        m.trapped = seg.graph.trapped;
      }
    }
    m.total_vertices = sum;
    if (!segments.empty()) m.avg_vertices = static_cast<double>(sum) / static_cast<double>(segments.size());
    return m;
  }
};

inline std::size_t default_iteration_cap(const GroundTruth& truth, const Configuration& start, double step) {
  const std::size_t cap = lattice_capacity(truth.workspace(), truth.robots(), start, step);
  return cap > std::numeric_limits<std::size_t>::max() / 4 ? std::numeric_limits<std::size_t>::max() : 4 * cap;
}

inline PlanResult plan(std::shared_ptr<const GroundTruth> truth, const Configuration& start,
                       const Configuration& target, const PlannerConfig& cfg) {
  check_same_dim(start.size(), truth->config_dim(), "plan");
  check_same_dim(target.size(), truth->config_dim(), "plan");
  cfg.validate(start.size());

  PlanResult result;
  result.step = cfg.gen.step;
  result.known = std::make_shared<KnownEnvironment>(truth, cfg.sensing_radius, cfg.gen.step / 10.0);
  KnownEnvironment& known = *result.known;
  require(point_feasible(start, known), ErrorKind::validation, "start violates known constraints");

  const std::size_t cap = cfg.max_iterations ? cfg.max_iterations : default_iteration_cap(*truth, start, cfg.gen.step);
  Configuration x = start;
  double t = 0.0;
  result.trajectory.push_back(TrajectoryPoint{0.0, 0, x});

  for (std::size_t iter = 0;; ++iter) {
    if (iter >= cap) {
      result.status = PlanStatus::resource_limit;
      result.message = "iteration cap reached";
      return result;
    }
    known.reveal_near(x);
    if (!point_feasible(x, known)) fail(ErrorKind::model_violation, "configuration inside a revealed obstacle");

    PlanSegment seg{x, known.revealed().size(),
                    GraphOutcome{SearchGraph(x, cfg.gen.step, cfg.gen.basis, PotentialField(target))}, {}, {}};
    try {
      seg.graph = generate_graph(x, target, known, cfg.gen, cfg.escape);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::resource_limit) throw;
      result.status = PlanStatus::resource_limit;
      result.message = e.what();
      return result;
    }
    const std::size_t index = result.segments.size();
    if (!seg.graph.connected()) {
      result.segments.push_back(std::move(seg));
      result.status = PlanStatus::no_feasible_path;
      result.message = "graph generation exhausted every reachable lattice vertex";
      return result;
    }
    seg.path = backtrace(seg.graph.graph);
    seg.motion = move_along(path_points(seg.graph.graph, *seg.path), known, cfg);
    for (std::size_t k = 1; k < seg.motion->traversed.size(); ++k) {
      t += distance(seg.motion->traversed[k - 1], seg.motion->traversed[k]);
      result.trajectory.push_back(TrajectoryPoint{t, index, seg.motion->traversed[k]});
    }
    x = seg.motion->stop_point;
    const bool reached = seg.motion->status == MotionStatus::reached_target;
    result.segments.push_back(std::move(seg));
    if (reached) {
      result.status = PlanStatus::success;
      return result;
    }
  }
}

}  // namespace fpplan
