#pragma once

// Potential-guided lattice tree growth from the current configuration
// toward the target.

#include <utility>
#include <vector>

#include "fpplan/environment.hpp"
#include "fpplan/error.hpp"
#include "fpplan/expansion.hpp"
#include "fpplan/feasibility.hpp"
#include "fpplan/search_graph.hpp"
#include "fpplan/trap_escape.hpp"

namespace fpplan {

enum class GraphStatus { connected, empty };

struct GraphOutcome {
  SearchGraph graph;
  GraphStatus status = GraphStatus::empty;
  bool trapped = false;  // some argmin vertex was a local minimum
  std::vector<EscapeEvent> escapes;
  std::vector<VertexId> expansion_order;  // argmin picks, for auditing

  explicit GraphOutcome(SearchGraph g) : graph(std::move(g)) {}

  bool connected() const noexcept { return status == GraphStatus::connected; }
};

/// Expands `v` along all 2n axis moves. Returns the new vertex ids in
/// insertion order; `v` is marked expanded even when nothing survives.
inline std::vector<VertexId> expand_vertex(SearchGraph& g, VertexId v, const KnownEnvironment& env,
                                           const GenConfig& cfg) {
  require(!g.vertex(v).expanded, ErrorKind::consistency, "vertex already expanded");
  std::vector<VertexId> out;
  for (const auto& c : feasible_candidates(g, v, env, axis_offsets(g.dim()))) {
    out.push_back(g.add_lattice_vertex(c.key, v));
    check_vertex_budget(g, cfg);
  }
  g.mark_expanded(v);
  return out;
}

class GraphBuilder {
 public:
  GraphBuilder(const Configuration& start, const Configuration& target, const KnownEnvironment& env,
               GenConfig cfg, TrapEscapePolicy escape)
      : env_(env),
        cfg_(std::move(cfg)),
        escape_(std::move(escape)),
        out_{SearchGraph(start, cfg_.step, cfg_.basis, PotentialField(target))} {
    check_same_dim(start.size(), target.size(), "generate_graph");
    check_same_dim(start.size(), env.truth().config_dim(), "generate_graph");
    cfg_.validate(start.size());
    if (escape_.mode == EscapeMode::fixed_shape) {
      require(env.truth().robots() > 1, ErrorKind::validation, "fixed-shape escape needs several robots");
      require(cfg_.basis.empty(), ErrorKind::validation, "fixed-shape escape needs the standard basis");
    }
  }

  GraphOutcome run() && {
    SearchGraph& g = out_.graph;
    const VertexId root = g.add_root();
    if (g.vertex(root).x == g.target()) {
      g.mark_root_as_target();
      out_.status = GraphStatus::connected;
      return std::move(out_);
    }
    if (try_link_target(g, root, env_, cfg_)) return done();
    heap_.push(g, root);

    while (true) {
      if (heap_.empty()) {
        if (parked_.empty()) {
          out_.status = GraphStatus::empty;
          return std::move(out_);
        }
        std::swap(heap_, parked_);
        continue;
      }
      const VertexId v = heap_.pop();
      if (g.vertex(v).expanded) continue;

      if (detect_local_min(g, v, env_, cfg_)) {
        out_.trapped = true;
        if (escape_.mode != EscapeMode::none && armed_) {
          armed_ = false;
          auto esc = run_escape(g, v, env_, cfg_, escape_);
          out_.escapes.push_back(esc.event);
          for (const auto id : esc.added) heap_.push(g, id);
          if (esc.event.result == EscapeResult::target_linked) return done();
          if (esc.event.result == EscapeResult::escaped) {
            park_all_but(esc.event.escape_vertex, v);
            continue;
          }
        }
      } else {
        armed_ = true;
      }

      out_.expansion_order.push_back(v);
      const auto fresh = expand_vertex(g, v, env_, cfg_);
      for (const auto id : fresh) {
        if (try_link_target(g, id, env_, cfg_)) return done();
        heap_.push(g, id);
      }
    }
  }

 private:
  GraphOutcome done() {
    out_.status = GraphStatus::connected;
    return std::move(out_);
  }

  // After an escape the search resumes from the escape vertex alone. Every
  // other open vertex, the trap included, waits in a reserve heap that is
  // consulted only when the resumed search runs dry, so completeness is
  // kept without refilling the trap first.
  void park_all_but(VertexId keep, VertexId trap) {
    const SearchGraph& g = out_.graph;
    while (!heap_.empty()) {
      const VertexId id = heap_.pop();
      if (id != keep && !g.vertex(id).expanded) parked_.push(g, id);
    }
    parked_.push(g, trap);
    if (!g.vertex(keep).expanded) heap_.push(g, keep);
  }

  const KnownEnvironment& env_;
  GenConfig cfg_;
  TrapEscapePolicy escape_;
  GraphOutcome out_;
  VertexHeap heap_;
  VertexHeap parked_;
  bool armed_ = true;
};

inline GraphOutcome generate_graph(const Configuration& start, const Configuration& target,
                                   const KnownEnvironment& env, const GenConfig& cfg,
                                   const TrapEscapePolicy& escape = {}) {
  return GraphBuilder(start, target, env, cfg, escape).run();
}

}  // namespace fpplan
