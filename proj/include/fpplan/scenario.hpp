#pragma once

// Line-oriented scenario files.
//
//   # comment
//   name maze-03
//   dim 2
//   workspace 0 0 1 1
//   robots 1
//   start 0.1 0.1
//   target 0.9 0.9
//   obstacle box 0.3 0.2 0.5 0.8 [known]
//   obstacle circle 0.7 0.5 0.05 [known]
//   sensing_radius 0.06
//   step 0.03
//
// One key per line, whitespace separated. `obstacle` may repeat; every
// other key appears at most once.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "fpplan/config_space.hpp"
#include "fpplan/environment.hpp"
#include "fpplan/error.hpp"
#include "fpplan/feasibility.hpp"
#include "fpplan/planner.hpp"
#include "fpplan/trap_escape.hpp"

namespace fpplan {

struct ObstacleSpec {
  enum class Shape { box, circle };
  Shape shape = Shape::box;
  std::vector<double> values;  // box: lo.. hi..; circle: center.. radius
  bool known = false;

  friend bool operator==(const ObstacleSpec&, const ObstacleSpec&) = default;
};

struct Scenario {
  std::string name;
  std::size_t dim = 0;
  std::vector<double> workspace_lo;
  std::vector<double> workspace_hi;
  std::size_t robots = 1;
  std::vector<double> start;
  std::vector<double> target;
  std::vector<ObstacleSpec> obstacles;
  double sensing_radius = 0.1;
  double step = 0.03;
  double stop_fraction = 0.5;
  std::optional<std::pair<double, double>> distance_band;
  EscapeMode escape = EscapeMode::none;
  double beta = 0.0;         // region diffusion strength; 0 picks the default
  double region_step = 0.0;  // region lattice pitch; 0 means `step`
  double connect_radius = 0.0;
  std::size_t max_vertices = 2'000'000;
  std::size_t max_iterations = 0;
  double region_shift = 0.0;  // translates region boxes; a testing aid

  std::size_t config_dim() const noexcept { return robots * dim; }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& msg) {
  fail(ErrorKind::parse, "line " + std::to_string(line) + ": " + msg);
}

inline double parse_number(std::string_view tok, std::size_t line) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    parse_fail(line, "malformed number '" + std::string(tok) + "'");
  }
  return v;
}

inline std::size_t parse_count(std::string_view tok, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    parse_fail(line, "malformed integer '" + std::string(tok) + "'");
  }
  return v;
}

inline std::vector<double> parse_numbers(const std::vector<std::string_view>& toks, std::size_t from,
                                         std::size_t line) {
  std::vector<double> out;
  for (std::size_t i = from; i < toks.size(); ++i) out.push_back(parse_number(toks[i], line));
  return out;
}

inline std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v == 0.0 ? 0.0 : v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += fmt(v[i]);
  }
  return s;
}

}  // namespace detail

inline EscapeMode parse_escape_mode(std::string_view s) {
  if (s == "none") return EscapeMode::none;
  if (s == "near-obstacle") return EscapeMode::near_obstacle;
  if (s == "fixed-shape") return EscapeMode::fixed_shape;
  fail(ErrorKind::parse, "unknown escape mode '" + std::string(s) + "'");
}

class ScenarioParser {
 public:
  /// `allow_replace` lets a scalar key overwrite an earlier value.
  void line(std::string_view raw, std::size_t lineno, bool allow_replace = false) {
    const auto hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto t = detail::split_ws(raw);
    if (t.empty()) return;
    const std::string key(t[0]);
    if (key != "obstacle") {
      if (!allow_replace && std::find(seen_.begin(), seen_.end(), key) != seen_.end()) {
        detail::parse_fail(lineno, "duplicate key '" + key + "'");
      }
      seen_.push_back(key);
    }
    auto args = [&](std::size_t want) {
      if (t.size() != want + 1) {
        detail::parse_fail(lineno, "'" + key + "' expects " + std::to_string(want) + " value(s)");
      }
    };
    auto one = [&] {
      args(1);
      return detail::parse_number(t[1], lineno);
    };
    if (key == "name") {
      args(1);
      s_.name = std::string(t[1]);
    } else if (key == "dim") {
      args(1);
      s_.dim = detail::parse_count(t[1], lineno);
    } else if (key == "workspace") {
      const auto v = detail::parse_numbers(t, 1, lineno);
      if (v.empty() || v.size() % 2) detail::parse_fail(lineno, "'workspace' expects lo.. hi..");
      s_.workspace_lo.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2));
      s_.workspace_hi.assign(v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    } else if (key == "robots") {
      args(1);
      s_.robots = detail::parse_count(t[1], lineno);
    } else if (key == "start") {
      s_.start = detail::parse_numbers(t, 1, lineno);
      has_start_ = true;
    } else if (key == "target") {
      s_.target = detail::parse_numbers(t, 1, lineno);
      has_target_ = true;
    } else if (key == "obstacle") {
      if (t.size() < 2) detail::parse_fail(lineno, "'obstacle' needs a shape");
      ObstacleSpec o;
      if (t[1] == "box") {
        o.shape = ObstacleSpec::Shape::box;
      } else if (t[1] == "circle") {
        o.shape = ObstacleSpec::Shape::circle;
      } else {
        detail::parse_fail(lineno, "unknown obstacle shape '" + std::string(t[1]) + "'");
      }
      std::size_t end = t.size();
      if (t.back() == "known") {
        o.known = true;
        --end;
      }
      for (std::size_t i = 2; i < end; ++i) o.values.push_back(detail::parse_number(t[i], lineno));
      obstacle_lines_.push_back(lineno);
      s_.obstacles.push_back(std::move(o));
    } else if (key == "sensing_radius") {
      s_.sensing_radius = one();
    } else if (key == "step") {
      s_.step = one();
    } else if (key == "stop_fraction") {
      s_.stop_fraction = one();
    } else if (key == "distance_band") {
      args(2);
      s_.distance_band = std::make_pair(detail::parse_number(t[1], lineno), detail::parse_number(t[2], lineno));
    } else if (key == "escape") {
      args(1);
      try {
        s_.escape = parse_escape_mode(t[1]);
      } catch (const Error& e) {
        detail::parse_fail(lineno, e.what());
      }
    } else if (key == "beta") {
      s_.beta = one();
    } else if (key == "region_step") {
      s_.region_step = one();
    } else if (key == "connect_radius") {
      s_.connect_radius = one();
    } else if (key == "max_vertices") {
      args(1);
      s_.max_vertices = detail::parse_count(t[1], lineno);
    } else if (key == "max_iterations") {
      args(1);
      s_.max_iterations = detail::parse_count(t[1], lineno);
    } else if (key == "region_shift") {
      s_.region_shift = one();
    } else {
      detail::parse_fail(lineno, "unknown key '" + key + "'");
    }
  }

  Scenario finish() const {
    Scenario s = s_;
    if (s.workspace_lo.empty() && s.dim > 0) {
      s.workspace_lo.assign(s.dim, 0.0);
      s.workspace_hi.assign(s.dim, 1.0);
    }
    if (!has_start_) fail(ErrorKind::validation, "start: missing");
    if (!has_target_) fail(ErrorKind::validation, "target: missing");
    return s;
  }

 private:
  Scenario s_;
  std::vector<std::string> seen_;
  std::vector<std::size_t> obstacle_lines_;
  bool has_start_ = false;
  bool has_target_ = false;
};

std::shared_ptr<const GroundTruth> make_truth(const Scenario& s);

/// Checks every invariant; errors name the offending field.
inline void validate_scenario(const Scenario& s) {
  auto bad = [](const std::string& field, const std::string& msg) { fail(ErrorKind::validation, field + ": " + msg); };
  if (s.dim == 0) bad("dim", "must be positive");
  if (s.workspace_lo.size() != s.dim || s.workspace_hi.size() != s.dim) bad("workspace", "needs dim lower and dim upper bounds");
  for (std::size_t i = 0; i < s.dim; ++i) {
    if (!(s.workspace_lo[i] < s.workspace_hi[i])) bad("workspace", "lower bound not below upper bound");
  }
  if (s.robots == 0) bad("robots", "must be at least 1");
  if (s.start.size() != s.config_dim()) bad("start", "expects robots*dim coordinates");
  if (s.target.size() != s.config_dim()) bad("target", "expects robots*dim coordinates");
  if (!(s.step > 0.0)) bad("step", "must be positive");
  if (!(s.sensing_radius > 0.0)) bad("sensing_radius", "must be positive");
  if (!(s.stop_fraction > 0.0 && s.stop_fraction < 1.0)) bad("stop_fraction", "must lie in (0, 1)");
  if (!(s.sensing_radius > s.step / 10.0)) bad("sensing_radius", "must exceed the motion step step/10");
  if (s.distance_band && !(s.distance_band->first < s.distance_band->second)) bad("distance_band", "needs dmin < dmax");
  if (s.distance_band && s.distance_band->first < 0.0) bad("distance_band", "dmin must be non-negative");
  if (s.beta < 0.0) bad("beta", "must be non-negative");
  if (s.region_step < 0.0) bad("region_step", "must be non-negative");
  if (s.connect_radius < 0.0) bad("connect_radius", "must be non-negative");
  if (s.max_vertices == 0) bad("max_vertices", "must be at least 1");
  if (s.escape == EscapeMode::fixed_shape && s.robots < 2) bad("escape", "fixed-shape needs at least 2 robots");
  for (std::size_t k = 0; k < s.obstacles.size(); ++k) {
    const auto& o = s.obstacles[k];
    const std::string field = "obstacle[" + std::to_string(k) + "]";
    if (o.shape == ObstacleSpec::Shape::box) {
      if (o.values.size() != 2 * s.dim) bad(field, "box expects 2*dim corner coordinates");
      for (std::size_t i = 0; i < s.dim; ++i) {
        if (o.values[s.dim + i] < o.values[i]) bad(field, "box max corner below min corner");
      }
    } else {
      if (o.values.size() != s.dim + 1) bad(field, "circle expects dim center coordinates and a radius");
      if (!(o.values.back() > 0.0)) bad(field, "circle radius must be positive");
    }
  }
  const auto truth = make_truth(s);
  const auto full = KnownEnvironment::omniscient(truth, s.sensing_radius, s.step / 10.0);
  if (!point_feasible(Configuration(s.start), full)) bad("start", "infeasible under the full environment");
  if (!point_feasible(Configuration(s.target), full)) bad("target", "infeasible under the full environment");
}

inline std::shared_ptr<const GroundTruth> make_truth(const Scenario& s) {
  Workspace ws{s.workspace_lo, s.workspace_hi};
  std::vector<ObstaclePrimitive> prims;
  std::vector<ImplicitConstraint> implicits;
  for (const auto& o : s.obstacles) {
    if (o.shape == ObstacleSpec::Shape::box) {
      Box b{std::vector<double>(o.values.begin(), o.values.begin() + static_cast<std::ptrdiff_t>(s.dim)),
            std::vector<double>(o.values.begin() + static_cast<std::ptrdiff_t>(s.dim), o.values.end())};
      prims.push_back(ObstaclePrimitive::make_box(std::move(b), o.known));
    } else {
      const std::vector<double> c(o.values.begin(), o.values.end() - 1);
      const double r = o.values.back();
      implicits.push_back(ImplicitConstraint{[c, r](std::span<const double> p) { return distance(p, c) - r; }, "circle"});
      prims.push_back(ObstaclePrimitive::make_implicit(implicits.size() - 1, o.known));
    }
  }
  std::optional<FormationBand> band;
  if (s.distance_band) band = FormationBand{s.distance_band->first, s.distance_band->second};
  return std::make_shared<const GroundTruth>(std::move(ws), std::move(prims), s.robots, band, std::move(implicits));
}

inline PlannerConfig planner_config(const Scenario& s) {
  PlannerConfig cfg;
  cfg.gen.step = s.step;
  cfg.gen.connect_radius = s.connect_radius;
  cfg.gen.max_vertices = s.max_vertices;
  cfg.escape.mode = s.escape;
  cfg.sensing_radius = s.sensing_radius;
  cfg.stop_fraction = s.stop_fraction;
  cfg.max_iterations = s.max_iterations;
  return cfg;
}

inline Scenario parse_scenario(std::string_view text) {
  ScenarioParser p;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    p.line(text.substr(pos, end - pos), ++lineno);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  Scenario s = p.finish();
  validate_scenario(s);
  return s;
}

/// Applies `KEY=VALUE` on top of a parsed scenario, then re-validates.
inline Scenario apply_override(const Scenario& base, std::string_view assignment);

/// Canonical text: fixed key order, shortest round-trip-safe numbers.
inline std::string serialize_scenario(const Scenario& s) {
  using detail::fmt;
  using detail::fmt_list;
  std::ostringstream o;
  if (!s.name.empty()) o << "name " << s.name << '\n';
  o << "dim " << s.dim << '\n';
  o << "workspace " << fmt_list(s.workspace_lo) << ' ' << fmt_list(s.workspace_hi) << '\n';
  o << "robots " << s.robots << '\n';
  o << "start " << fmt_list(s.start) << '\n';
  o << "target " << fmt_list(s.target) << '\n';
  for (const auto& ob : s.obstacles) {
    o << "obstacle " << (ob.shape == ObstacleSpec::Shape::box ? "box " : "circle ") << fmt_list(ob.values);
    if (ob.known) o << " known";
    o << '\n';
  }
  o << "sensing_radius " << fmt(s.sensing_radius) << '\n';
  o << "step " << fmt(s.step) << '\n';
  o << "stop_fraction " << fmt(s.stop_fraction) << '\n';
  if (s.distance_band) o << "distance_band " << fmt(s.distance_band->first) << ' ' << fmt(s.distance_band->second) << '\n';
  o << "escape " << to_string(s.escape) << '\n';
  o << "beta " << fmt(s.beta) << '\n';
  o << "region_step " << fmt(s.region_step) << '\n';
  o << "connect_radius " << fmt(s.connect_radius) << '\n';
  o << "max_vertices " << s.max_vertices << '\n';
  o << "max_iterations " << s.max_iterations << '\n';
  if (s.region_shift != 0.0) o << "region_shift " << fmt(s.region_shift) << '\n';
  return o.str();
}

inline Scenario apply_override(const Scenario& base, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    fail(ErrorKind::parse, "override '" + std::string(assignment) + "' is not KEY=VALUE");
  }
  std::string line(assignment.substr(0, eq));
  line += ' ';
  for (const char c : assignment.substr(eq + 1)) line += c == ',' ? ' ' : c;
  ScenarioParser p;
  const std::string text = serialize_scenario(base);
  std::size_t lineno = 0;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) p.line(l, ++lineno);
  try {
    p.line(line, 0, true);
  } catch (const Error& e) {
    fail(e.kind(), std::string("override: ") + e.what());
  }
  Scenario s = p.finish();
  validate_scenario(s);
  return s;
}

}  // namespace fpplan
