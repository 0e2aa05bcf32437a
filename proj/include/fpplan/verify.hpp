#pragma once

// Region containment check on a fully revealed scenario: plan with stops
// snapped to lattice vertices, build the region on a lattice anchored at the
// start, and test every trajectory point against the region boxes.

#include <optional>
#include <vector>

#include "fpplan/fpe.hpp"
#include "fpplan/planner.hpp"
#include "fpplan/region.hpp"
#include "fpplan/scenario.hpp"

namespace fpplan {

struct RegionCheck {
  Scenario scenario;  // with every obstacle marked known
  PlanResult plan;
  std::optional<Lattice> lattice;
  std::optional<RegionBuild> build;
  std::optional<BoxUnion> boxes;
  bool contains = false;
};

inline RegionCheck check_region(Scenario s) {
  require(s.config_dim() <= kMaxLatticeDim, ErrorKind::invalid_argument,
          "region: configuration dimension " + std::to_string(s.config_dim()) + " exceeds " +
              std::to_string(kMaxLatticeDim));
  for (auto& o : s.obstacles) o.known = true;
  const auto truth = make_truth(s);
  const Configuration start(s.start);
  const Configuration target(s.target);

  PlannerConfig cfg = planner_config(s);
  cfg.snap_stops_to_lattice = true;
  RegionCheck out{s, plan(truth, start, target, cfg), {}, {}, {}, false};
  if (out.plan.status != PlanStatus::success) return out;

  const auto env = KnownEnvironment::omniscient(truth, s.sensing_radius, s.step / 10.0);
  const double dx = s.region_step > 0.0 ? s.region_step : s.step;
  out.lattice = build_lattice(env, start, dx, PotentialField(target));
  const auto start_node = out.lattice->node_at(LatticeKey(start.size(), 0));
  require(start_node.has_value(), ErrorKind::consistency, "start is not a lattice node");
  out.build = build_Rf(*start_node, out.lattice->nearest_node(target), *out.lattice, s.beta);
  out.boxes = region_boxes(out.build->region, *out.lattice, s.step, s.region_shift);
  std::vector<Configuration> track;
  track.reserve(out.plan.trajectory.size());
  for (const auto& p : out.plan.trajectory) track.push_back(p.x);
  out.contains = contains_path(*out.boxes, track);
  return out;
}

}  // namespace fpplan
