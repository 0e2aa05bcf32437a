#pragma once

// Candidate generation shared by plain and restricted expansion: lattice
// moves expressed as integer key offsets, filtered by feasibility and
// de-duplication.

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "fpplan/config_space.hpp"
#include "fpplan/environment.hpp"
#include "fpplan/feasibility.hpp"
#include "fpplan/search_graph.hpp"

namespace fpplan {

using KeyOffset = std::vector<std::int64_t>;

/// +e0, -e0, +e1, -e1, ... in key space. This order fixes insertion order.
inline std::vector<KeyOffset> axis_offsets(std::size_t n) {
  std::vector<KeyOffset> out;
  out.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    KeyOffset plus(n, 0);
    plus[i] = 1;
    KeyOffset minus(n, 0);
    minus[i] = -1;
    out.push_back(std::move(plus));
    out.push_back(std::move(minus));
  }
  return out;
}

struct Candidate {
  LatticeKey key;
  Configuration x;
  double potential = 0.0;
};

inline LatticeKey offset_key(const LatticeKey& key, const KeyOffset& d) {
  LatticeKey out(key);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i];
  return out;
}

/// Unvisited neighbours of `v` along `offsets` that are feasible points and
/// reachable by a feasible straight segment, in offset order.
inline std::vector<Candidate> feasible_candidates(const SearchGraph& g, VertexId v,
                                                  const KnownEnvironment& env,
                                                  const std::vector<KeyOffset>& offsets) {
  const Vertex& from = g.vertex(v);
  require(from.on_lattice, ErrorKind::consistency, "cannot expand the off-lattice target");
  std::vector<Candidate> out;
  for (const auto& d : offsets) {
    LatticeKey key = offset_key(from.key, d);
    if (g.find(key)) continue;
    Configuration x = g.point_at(key);
    if (!point_feasible(x, env)) continue;
    if (!segment_feasible(from.x, x, env)) continue;
    const double p = g.field()(x);
    out.push_back(Candidate{std::move(key), std::move(x), p});
  }
  return out;
}

/// Target reachable from `v` by the final straight link.
inline bool target_linkable(const SearchGraph& g, VertexId v, const KnownEnvironment& env,
                            const GenConfig& cfg) {
  const Vertex& q = g.vertex(v);
  if (distance(q.x, g.target()) > cfg.effective_connect_radius(g.dim())) return false;
  return point_feasible(g.target(), env) && segment_feasible(q.x, g.target(), env);
}

/// Links the target to `v` when allowed. Returns true on success.
inline bool try_link_target(SearchGraph& g, VertexId v, const KnownEnvironment& env,
                            const GenConfig& cfg) {
  if (g.contains_target() || !target_linkable(g, v, env, cfg)) return false;
  g.add_target(v);
  return true;
}

/// Min-heap on (potential, id). Ids grow with insertion, so equal
/// potentials pop first-in first-out.
class VertexHeap {
 public:
  void push(const SearchGraph& g, VertexId id) { heap_.emplace(g.vertex(id).potential, id); }
  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }
  VertexId pop() {
    const VertexId id = heap_.top().second;
    heap_.pop();
    return id;
  }
  void clear() { heap_ = {}; }

 private:
  using Entry = std::pair<double, VertexId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap_;
};

inline void check_vertex_budget(const SearchGraph& g, const GenConfig& cfg) {
  if (g.size() > cfg.max_vertices) {
    fail(ErrorKind::resource_limit,
         "graph exceeded max_vertices (" + std::to_string(cfg.max_vertices) + ")");
  }
}

}  // namespace fpplan
