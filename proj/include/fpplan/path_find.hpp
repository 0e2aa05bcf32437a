#pragma once

// Root-to-target path extraction. In a tree all three extractors must
// agree; BFS and Dijkstra run over the undirected edge set so they would
// still be meaningful on denser graphs.

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>
#include <utility>
#include <vector>

#include "fpplan/error.hpp"
#include "fpplan/search_graph.hpp"

namespace fpplan {

struct GraphPath {
  std::vector<VertexId> vertices;
  double length = 0.0;
  std::size_t hops = 0;

  friend bool operator==(const GraphPath& a, const GraphPath& b) { return a.vertices == b.vertices; }
};

inline double path_length(const SearchGraph& g, const std::vector<VertexId>& ids) {
  double len = 0.0;
  for (std::size_t i = 1; i < ids.size(); ++i) len += distance(g.vertex(ids[i - 1]).x, g.vertex(ids[i]).x);
  return len;
}

inline GraphPath make_path(const SearchGraph& g, std::vector<VertexId> ids) {
  GraphPath p;
  p.length = path_length(g, ids);
  p.hops = ids.empty() ? 0 : ids.size() - 1;
  p.vertices = std::move(ids);
  return p;
}

inline VertexId require_target(const SearchGraph& g) {
  require(g.contains_target(), ErrorKind::invalid_argument, "graph does not contain the target");
  return *g.target_vertex();
}

inline GraphPath backtrace(const SearchGraph& g) {
  VertexId v = require_target(g);
  std::vector<VertexId> ids;
  while (v != kNoVertex) {
    ids.push_back(v);
    require(ids.size() <= g.size(), ErrorKind::consistency, "ancestor chain has a cycle");
    v = g.vertex(v).ancestor;
  }
  require(ids.back() == g.root(), ErrorKind::consistency, "ancestor chain does not end at the root");
  std::reverse(ids.begin(), ids.end());
  return make_path(g, std::move(ids));
}

inline std::vector<std::vector<VertexId>> adjacency(const SearchGraph& g) {
  std::vector<std::vector<VertexId>> adj(g.size());
  for (VertexId v = 0; v < g.size(); ++v) {
    const VertexId a = g.vertex(v).ancestor;
    if (a == kNoVertex) continue;
    adj[v].push_back(a);
    adj[a].push_back(v);
  }
  return adj;
}

namespace detail {

inline std::vector<VertexId> unwind(const std::vector<VertexId>& prev, VertexId root, VertexId target) {
  require(target == root || prev[target] != kNoVertex, ErrorKind::consistency, "target unreachable");
  std::vector<VertexId> ids;
  for (VertexId v = target; v != kNoVertex; v = v == root ? kNoVertex : prev[v]) ids.push_back(v);
  std::reverse(ids.begin(), ids.end());
  return ids;
}

}  // namespace detail

/// Minimum hop count with unit edge weights.
inline GraphPath bfs_path(const SearchGraph& g) {
  const VertexId target = require_target(g);
  const auto adj = adjacency(g);
  std::vector<VertexId> prev(g.size(), kNoVertex);
  std::vector<char> seen(g.size(), 0);
  std::deque<VertexId> queue{g.root()};
  seen[g.root()] = 1;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    if (v == target) break;
    for (const auto w : adj[v]) {
      if (seen[w]) continue;
      seen[w] = 1;
      prev[w] = v;
      queue.push_back(w);
    }
  }
  return make_path(g, detail::unwind(prev, g.root(), target));
}

/// Minimum Euclidean length, edge weight |v_i - v_j|.
inline GraphPath dijkstra_path(const SearchGraph& g) {
  const VertexId target = require_target(g);
  const auto adj = adjacency(g);
  std::vector<double> dist(g.size(), kInf);
  std::vector<VertexId> prev(g.size(), kNoVertex);
  using Entry = std::pair<double, VertexId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  dist[g.root()] = 0.0;
  heap.emplace(0.0, g.root());
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    if (v == target) break;
    for (const auto w : adj[v]) {
      const double nd = d + distance(g.vertex(v).x, g.vertex(w).x);
      if (nd < dist[w]) {
        dist[w] = nd;
        prev[w] = v;
        heap.emplace(nd, w);
      }
    }
  }
  return make_path(g, detail::unwind(prev, g.root(), target));
}

/// Configurations along a path, root first.
inline std::vector<Configuration> path_points(const SearchGraph& g, const GraphPath& p) {
  std::vector<Configuration> pts;
  pts.reserve(p.vertices.size());
  for (const auto id : p.vertices) pts.push_back(g.vertex(id).x);
  return pts;
}

}  // namespace fpplan
