#pragma once

// Local-minimum detection and the two restricted expansions used to climb
// out of a potential trap: hugging revealed obstacles, or moving the robot
// formation as a rigid body.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "fpplan/environment.hpp"
#include "fpplan/error.hpp"
#include "fpplan/expansion.hpp"
#include "fpplan/search_graph.hpp"

namespace fpplan {

enum class EscapeMode { none, near_obstacle, fixed_shape };

inline const char* to_string(EscapeMode m) {
  switch (m) {
    case EscapeMode::none: return "none";
    case EscapeMode::near_obstacle: return "near-obstacle";
    case EscapeMode::fixed_shape: return "fixed-shape";
  }
  return "?";
}

using RobotPair = std::pair<std::size_t, std::size_t>;

struct TrapEscapePolicy {
  EscapeMode mode = EscapeMode::none;
  /// Near-obstacle shell width. Unset: clearance of the trap vertex,
  /// floored at half a lattice step.
  std::optional<double> epsilon;
  /// Pairs whose offset is frozen. Empty: the chain (0,1), (1,2), ...
  /// Relaxation drops the last active pair first.
  std::vector<RobotPair> shape_constraints;
};

enum class EscapeResult { escaped, target_linked, fallback };

inline const char* to_string(EscapeResult r) {
  switch (r) {
    case EscapeResult::escaped: return "escaped";
    case EscapeResult::target_linked: return "target";
    case EscapeResult::fallback: return "fallback";
  }
  return "?";
}

struct EscapeEvent {
  VertexId activation = kNoVertex;
  EscapeMode mode = EscapeMode::none;
  std::size_t vertices_added = 0;
  std::size_t relaxations = 0;
  EscapeResult result = EscapeResult::fallback;
  VertexId escape_vertex = kNoVertex;
  double epsilon = 0.0;
};

struct EscapeOutcome {
  EscapeEvent event;
  std::vector<VertexId> added;
};

/// No feasible, unvisited neighbour with lower potential and no target link.
inline bool detect_local_min(const SearchGraph& g, VertexId v, const KnownEnvironment& env,
                             const GenConfig& cfg) {
  if (g.contains_target() && g.target_vertex() == v) return false;
  if (target_linkable(g, v, env, cfg)) return false;
  const double pv = g.vertex(v).potential;
  for (const auto& c : feasible_candidates(g, v, env, axis_offsets(g.dim()))) {
    if (c.potential < pv) return false;
  }
  return true;
}

/// Vertices within sqrt(2)*l of the current shell peak `y` that still have
/// a feasible, unvisited, lower neighbour along `offsets`.
class EscapeSet {
 public:
  EscapeSet(Configuration center, double step, std::vector<KeyOffset> offsets)
      : center_(std::move(center)),
        radius_(std::sqrt(2.0) * step * (1.0 + 1e-9)),
        offsets_(std::move(offsets)) {}

  const Configuration& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  void recenter(Configuration y) { center_ = std::move(y); }
  void set_offsets(std::vector<KeyOffset> offsets) { offsets_ = std::move(offsets); }

  bool contains(const SearchGraph& g, VertexId x, const KnownEnvironment& env) const {
    const Vertex& vx = g.vertex(x);
    if (!vx.on_lattice || distance(vx.x, center_) > radius_) return false;
    for (const auto& c : feasible_candidates(g, x, env, offsets_)) {
      if (c.potential < vx.potential) return true;
    }
    return false;
  }

 private:
  Configuration center_;
  double radius_;
  std::vector<KeyOffset> offsets_;
};

namespace detail {

// Shared bookkeeping of one restricted episode.
struct Episode {
  SearchGraph& g;
  const KnownEnvironment& env;
  const GenConfig& cfg;
  EscapeOutcome out;
  VertexId peak;
  EscapeSet shell;

  Episode(SearchGraph& graph, VertexId trap, const KnownEnvironment& e, const GenConfig& c,
          EscapeMode mode, std::vector<KeyOffset> offsets)
      : g(graph), env(e), cfg(c), peak(trap), shell(graph.vertex(trap).x, graph.step(), std::move(offsets)) {
    out.event.activation = trap;
    out.event.mode = mode;
  }

  VertexId insert(const Candidate& c, VertexId parent) {
    const VertexId id = g.add_lattice_vertex(c.key, parent);
    check_vertex_budget(g, cfg);
    out.added.push_back(id);
    ++out.event.vertices_added;
    if (g.vertex(id).potential > g.vertex(peak).potential) {
      peak = id;
      shell.recenter(g.vertex(id).x);
    }
    return id;
  }

  EscapeOutcome finish(EscapeResult r, VertexId at = kNoVertex) {
    out.event.result = r;
    out.event.escape_vertex = at;
    return std::move(out);
  }
};

}  // namespace detail

/// Restricted expansion from `trap` admitting only candidates within
/// epsilon of a revealed primitive. Stops on escape-set entry or a target
/// link; falls back when the restricted frontier runs dry.
inline EscapeOutcome escape_near_obstacle(SearchGraph& g, VertexId trap, const KnownEnvironment& env,
                                          const GenConfig& cfg, const TrapEscapePolicy& policy = {}) {
  const auto offsets = axis_offsets(g.dim());
  detail::Episode ep(g, trap, env, cfg, EscapeMode::near_obstacle, offsets);
  const double eps = policy.epsilon ? *policy.epsilon
                                    : std::max(distance_to_revealed(g.vertex(trap).x, env), 0.5 * g.step());
  ep.out.event.epsilon = eps;
  if (ep.shell.contains(g, trap, env)) return ep.finish(EscapeResult::escaped, trap);
  if (!std::isfinite(eps)) return ep.finish(EscapeResult::fallback);

  std::vector<char> done;
  VertexHeap heap;
  heap.push(g, trap);
  while (!heap.empty()) {
    const VertexId v = heap.pop();
    if (v < done.size() && done[v]) continue;
    if (done.size() <= v) done.resize(g.size(), 0);
    done[v] = 1;
    std::vector<VertexId> fresh;
    for (const auto& c : feasible_candidates(g, v, env, offsets)) {
      if (distance_to_revealed(c.x, env) > eps) continue;
      const VertexId id = ep.insert(c, v);
      fresh.push_back(id);
      heap.push(g, id);
    }
    for (const auto id : fresh) {
      if (try_link_target(g, id, env, cfg)) return ep.finish(EscapeResult::target_linked, id);
    }
    for (const auto id : fresh) {
      if (ep.shell.contains(g, id, env)) return ep.finish(EscapeResult::escaped, id);
    }
  }
  return ep.finish(EscapeResult::fallback);
}

/// Translation offsets for each connected group of robots under the active
/// pair constraints: every robot of a group moves by one step along one
/// workspace axis.
inline std::vector<KeyOffset> formation_offsets(std::size_t robots, std::size_t wdim,
                                                const std::vector<RobotPair>& active) {
  std::vector<std::size_t> parent(robots);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& [a, b] : active) {
    const auto ra = root(a);
    const auto rb = root(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<KeyOffset> out;
  for (std::size_t leader = 0; leader < robots; ++leader) {
    if (root(leader) != leader) continue;
    for (std::size_t axis = 0; axis < wdim; ++axis) {
      for (const int sign : {1, -1}) {
        KeyOffset d(robots * wdim, 0);
        for (std::size_t r = 0; r < robots; ++r) {
          if (root(r) == leader) d[r * wdim + axis] = sign;
        }
        out.push_back(std::move(d));
      }
    }
  }
  return out;
}

inline std::vector<RobotPair> chain_constraints(std::size_t robots) {
  std::vector<RobotPair> out;
  for (std::size_t r = 0; r + 1 < robots; ++r) out.emplace_back(r, r + 1);
  return out;
}

/// Restricted expansion that moves groups of robots rigidly. When the
/// frontier runs dry, one pair constraint is dropped and the episode's
/// vertices are re-expanded with the larger move set; dropping the last
/// constraint hands control back to the unrestricted search.
inline EscapeOutcome escape_fixed_shape(SearchGraph& g, VertexId trap, const KnownEnvironment& env,
                                        const GenConfig& cfg, const TrapEscapePolicy& policy = {}) {
  const auto& truth = env.truth();
  require(truth.robots() > 1, ErrorKind::invalid_argument, "fixed-shape escape needs several robots");
  require(g.standard_basis(), ErrorKind::invalid_argument, "fixed-shape escape needs the standard basis");
  std::vector<RobotPair> active =
      policy.shape_constraints.empty() ? chain_constraints(truth.robots()) : policy.shape_constraints;
  for (const auto& [a, b] : active) {
    require(a < truth.robots() && b < truth.robots() && a != b, ErrorKind::invalid_argument,
            "shape constraint names an unknown robot pair");
  }

  auto offsets = formation_offsets(truth.robots(), truth.workspace_dim(), active);
  detail::Episode ep(g, trap, env, cfg, EscapeMode::fixed_shape, offsets);
  if (ep.shell.contains(g, trap, env)) return ep.finish(EscapeResult::escaped, trap);

  std::vector<VertexId> members{trap};
  while (true) {
    std::vector<char> done(g.size(), 0);
    VertexHeap heap;
    for (const auto m : members) heap.push(g, m);
    while (!heap.empty()) {
      const VertexId v = heap.pop();
      if (v < done.size() && done[v]) continue;
      if (done.size() <= v) done.resize(g.size(), 0);
      done[v] = 1;
      std::vector<VertexId> fresh;
      for (const auto& c : feasible_candidates(g, v, env, offsets)) {
        const VertexId id = ep.insert(c, v);
        fresh.push_back(id);
        members.push_back(id);
        heap.push(g, id);
      }
      for (const auto id : fresh) {
        if (try_link_target(g, id, env, cfg)) return ep.finish(EscapeResult::target_linked, id);
      }
      for (const auto id : fresh) {
        if (ep.shell.contains(g, id, env)) return ep.finish(EscapeResult::escaped, id);
      }
    }
    if (active.empty()) return ep.finish(EscapeResult::fallback);
    active.pop_back();
    ++ep.out.event.relaxations;
    if (active.empty()) return ep.finish(EscapeResult::fallback);
    offsets = formation_offsets(truth.robots(), truth.workspace_dim(), active);
    ep.shell.set_offsets(offsets);
  }
}

inline EscapeOutcome run_escape(SearchGraph& g, VertexId trap, const KnownEnvironment& env,
                                const GenConfig& cfg, const TrapEscapePolicy& policy) {
  switch (policy.mode) {
    case EscapeMode::near_obstacle: return escape_near_obstacle(g, trap, env, cfg, policy);
    case EscapeMode::fixed_shape: return escape_fixed_shape(g, trap, env, cfg, policy);
    case EscapeMode::none: break;
  }
  fail(ErrorKind::invalid_argument, "no escape mode selected");
}

}  // namespace fpplan
