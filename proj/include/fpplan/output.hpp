#pragma once

// Text emitters for plan and region runs: trajectory and metrics CSV,
// graph and region dumps, SVG renderings of 2D workspaces.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "fpplan/environment.hpp"
#include "fpplan/fpe.hpp"
#include "fpplan/planner.hpp"
#include "fpplan/region.hpp"
#include "fpplan/search_graph.hpp"

namespace fpplan {

/// Fixed-point formatting keeps files byte-stable across runs.
inline std::string fixed(double v, int digits = 9) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v == 0.0 ? 0.0 : v);
  return buf;
}

inline std::string trajectory_csv(const PlanResult& r) {
  std::ostringstream o;
  const std::size_t n = r.trajectory.empty() ? 0 : r.trajectory.front().x.size();
  o << "t,segment_index";
  for (std::size_t i = 0; i < n; ++i) o << ",x" << i;
  o << '\n';
  for (const auto& p : r.trajectory) {
    o << fixed(p.t) << ',' << p.segment;
    for (const auto v : p.x) o << ',' << fixed(v);
    o << '\n';
  }
  return o.str();
}

inline std::string metrics_header() { return "num_robots,l,dim,avg_vertices,max_vertices,trapped,num_graphs"; }

inline std::string metrics_row(const PlanMetrics& m) {
  std::ostringstream o;
  o << m.num_robots << ',' << fixed(m.step, 6) << ',' << m.dim << ',' << fixed(m.avg_vertices, 3) << ','
    << m.max_vertices << ',' << (m.trapped ? "true" : "false") << ',' << m.num_graphs;
  return o.str();
}

inline std::string metrics_csv(const PlanResult& r) { return metrics_header() + "\n" + metrics_row(r.metrics()) + "\n"; }

inline std::string escape_events_csv(const PlanResult& r) {
  std::ostringstream o;
  o << "graph,activation,mode,vertices_added,relaxations,result,escape_vertex,epsilon\n";
  for (std::size_t g = 0; g < r.segments.size(); ++g) {
    for (const auto& e : r.segments[g].graph.escapes) {
      o << g << ',' << e.activation << ',' << to_string(e.mode) << ',' << e.vertices_added << ','
        << e.relaxations << ',' << to_string(e.result) << ','
        << (e.escape_vertex == kNoVertex ? std::string("-1") : std::to_string(e.escape_vertex)) << ','
        << fixed(e.epsilon) << '\n';
    }
  }
  return o.str();
}

/// One vertex per line: id ancestor potential coords (root ancestor -1).
inline std::string graph_dump(const SearchGraph& g) {
  std::ostringstream o;
  for (VertexId id = 0; id < g.size(); ++id) {
    const auto& v = g.vertex(id);
    o << id << ' ' << (v.ancestor == kNoVertex ? std::string("-1") : std::to_string(v.ancestor)) << ' '
      << fixed(v.potential);
    for (const auto c : v.x) o << ' ' << fixed(c);
    o << '\n';
  }
  return o.str();
}

/// One lattice node per line: coords in_region steady_rho.
inline std::string region_dump(const Lattice& lat, const Region& region, const std::vector<double>& steady) {
  std::ostringstream o;
  for (std::size_t j = 0; j < lat.size(); ++j) {
    for (const auto c : lat.coords[j]) o << fixed(c) << ' ';
    o << (region.contains(j) ? 1 : 0) << ' ';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9e", j < steady.size() ? steady[j] : 0.0);
    o << buf << '\n';
  }
  return o.str();
}

/// Minimal SVG writer for a 2D workspace, y axis pointing up.
class SvgCanvas {
 public:
  SvgCanvas(const Workspace& ws, int size = 600) : ws_(ws), size_(size) {
    const double w = ws.hi[0] - ws.lo[0];
    const double h = ws.hi[1] - ws.lo[1];
    scale_ = static_cast<double>(size) / std::max(w, h);
    o_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(w) << "\" height=\"" << px(h)
       << "\" viewBox=\"0 0 " << px(w) << ' ' << px(h) << "\">\n";
    o_ << "<rect x=\"0\" y=\"0\" width=\"" << px(w) << "\" height=\"" << px(h)
       << "\" fill=\"white\" stroke=\"black\"/>\n";
  }

  std::string X(double x) const { return px(x - ws_.lo[0]); }
  std::string Y(double y) const { return px(ws_.hi[1] - y); }
  std::string px(double v) const { return fixed(v * scale_, 3); }

  void box(const Box& b, const char* fill) {
    o_ << "<rect x=\"" << X(b.lo[0]) << "\" y=\"" << Y(b.hi[1]) << "\" width=\"" << px(b.hi[0] - b.lo[0])
       << "\" height=\"" << px(b.hi[1] - b.lo[1]) << "\" fill=\"" << fill << "\"/>\n";
  }

  void square(double cx, double cy, double half, const char* fill, double opacity) {
    o_ << "<rect x=\"" << X(cx - half) << "\" y=\"" << Y(cy + half) << "\" width=\"" << px(2 * half)
       << "\" height=\"" << px(2 * half) << "\" fill=\"" << fill << "\" fill-opacity=\"" << fixed(opacity, 2)
       << "\"/>\n";
  }

  void circle(double cx, double cy, double r, const char* fill, const char* stroke = "none") {
    o_ << "<circle cx=\"" << X(cx) << "\" cy=\"" << Y(cy) << "\" r=\"" << px(r) << "\" fill=\"" << fill
       << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void line(double x0, double y0, double x1, double y1, const char* stroke, double width) {
    o_ << "<line x1=\"" << X(x0) << "\" y1=\"" << Y(y0) << "\" x2=\"" << X(x1) << "\" y2=\"" << Y(y1)
       << "\" stroke=\"" << stroke << "\" stroke-width=\"" << fixed(width, 2) << "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke, double width) {
    if (pts.size() < 2) return;
    o_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << fixed(width, 2) << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) o_ << (i ? " " : "") << X(pts[i].first) << ',' << Y(pts[i].second);
    o_ << "\"/>\n";
  }

  void diamond(double cx, double cy, double r, const char* fill) {
    o_ << "<polygon points=\"" << X(cx) << ',' << Y(cy + r) << ' ' << X(cx + r) << ',' << Y(cy) << ' ' << X(cx) << ','
       << Y(cy - r) << ' ' << X(cx - r) << ',' << Y(cy) << "\" fill=\"" << fill << "\" stroke=\"black\"/>\n";
  }

  std::string finish() {
    o_ << "</svg>\n";
    return o_.str();
  }

 private:
  Workspace ws_;
  int size_;
  double scale_ = 1.0;
  std::ostringstream o_;
};

inline constexpr const char* kUndetectedFill = "#d3d3d3";
inline constexpr const char* kDetectedFill = "#696969";

namespace detail {

inline void draw_obstacles(SvgCanvas& svg, const GroundTruth& truth, const std::vector<char>& detected) {
  for (std::size_t id = 0; id < truth.primitives().size(); ++id) {
    const auto& p = truth.primitives()[id];
    const char* fill = detected[id] ? kDetectedFill : kUndetectedFill;
    if (p.kind == PrimitiveKind::box) {
      svg.box(p.box, fill);
      continue;
    }
    // Implicit constraints: shade grid cells whose centre is inside.
    const auto& ws = truth.workspace();
    const double cell = std::max(ws.hi[0] - ws.lo[0], ws.hi[1] - ws.lo[1]) / 200.0;
    for (double x = ws.lo[0] + cell / 2; x < ws.hi[0]; x += cell) {
      for (double y = ws.lo[1] + cell / 2; y < ws.hi[1]; y += cell) {
        const double q[2] = {x, y};
        if (truth.interior_contains(id, q)) svg.box(Box{{x - cell / 2, y - cell / 2}, {x + cell / 2, y + cell / 2}}, fill);
      }
    }
  }
}

inline void draw_markers(SvgCanvas& svg, const Configuration& start, const Configuration& target, std::size_t robots,
                         double r) {
  for (std::size_t k = 0; k < robots; ++k) {
    svg.diamond(start[2 * k], start[2 * k + 1], r, "#2e8b57");
    svg.circle(target[2 * k], target[2 * k + 1], r, "#b22222", "black");
  }
}

inline void draw_graph(SvgCanvas& svg, const SearchGraph& g, std::size_t robots, const char* stroke) {
  for (VertexId id = 0; id < g.size(); ++id) {
    const auto& v = g.vertex(id);
    if (v.ancestor == kNoVertex) continue;
    const auto& a = g.vertex(v.ancestor);
    for (std::size_t k = 0; k < robots; ++k) svg.line(a.x[2 * k], a.x[2 * k + 1], v.x[2 * k], v.x[2 * k + 1], stroke, 0.5);
  }
}

inline void draw_track(SvgCanvas& svg, const std::vector<Configuration>& pts, std::size_t robots, const char* stroke,
                       double width) {
  for (std::size_t k = 0; k < robots; ++k) {
    std::vector<std::pair<double, double>> xy;
    xy.reserve(pts.size());
    for (const auto& p : pts) xy.emplace_back(p[2 * k], p[2 * k + 1]);
    svg.polyline(xy, stroke, width);
  }
}

}  // namespace detail

/// Segment `i` of a 2D plan: obstacles shaded by what was known when the
/// segment's graph was grown, the graph, its path, and the motion.
inline std::string segment_svg(const PlanResult& r, std::size_t i, const Configuration& target) {
  const auto& truth = r.known->truth();
  require(truth.workspace_dim() == 2, ErrorKind::invalid_argument, "SVG output needs a 2D workspace");
  const auto& seg = r.segments.at(i);
  std::vector<char> detected(truth.primitives().size(), 0);
  const auto& order = r.known->revealed();
  for (std::size_t k = 0; k < seg.revealed_count && k < order.size(); ++k) detected[order[k]] = 1;

  SvgCanvas svg(truth.workspace());
  detail::draw_obstacles(svg, truth, detected);
  detail::draw_graph(svg, seg.graph.graph, truth.robots(), "#4169e1");
  if (seg.path) detail::draw_track(svg, path_points(seg.graph.graph, *seg.path), truth.robots(), "#ff8c00", 1.5);
  if (seg.motion) detail::draw_track(svg, seg.motion->traversed, truth.robots(), "black", 2.0);
  detail::draw_markers(svg, seg.start, target, truth.robots(), 0.012);
  return svg.finish();
}

/// Region boxes in gray under the graph of a plan on the same environment.
inline std::string region_svg(const GroundTruth& truth, const BoxUnion& boxes, const PlanResult& r,
                              const Configuration& start, const Configuration& target) {
  require(truth.workspace_dim() == 2 && truth.robots() == 1, ErrorKind::invalid_argument,
          "region SVG needs one robot in a 2D workspace");
  SvgCanvas svg(truth.workspace());
  for (const auto& c : boxes.centers()) svg.square(c[0], c[1], boxes.half_width(), "#a9a9a9", 0.35);
  std::vector<char> all(truth.primitives().size(), 1);
  detail::draw_obstacles(svg, truth, all);
  for (const auto& seg : r.segments) detail::draw_graph(svg, seg.graph.graph, 1, "#4169e1");
  std::vector<Configuration> track;
  for (const auto& p : r.trajectory) track.push_back(p.x);
  detail::draw_track(svg, track, 1, "black", 2.0);
  detail::draw_markers(svg, start, target, 1, 0.012);
  return svg.finish();
}

}  // namespace fpplan
