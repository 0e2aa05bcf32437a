// Plans past a wall that is hidden until the robot senses it, then prints
// the trajectory and the run metrics.

#include <iostream>
#include <memory>

#include "fpplan/fpplan.hpp"

int main() {
  using namespace fpplan;
  auto truth = std::make_shared<const GroundTruth>(
      Workspace::unit(2), std::vector<ObstaclePrimitive>{ObstaclePrimitive::make_box(Box{{0.45, 0.2}, {0.55, 0.8}}, false)});

  PlannerConfig cfg;
  cfg.gen.step = 0.02;
  cfg.sensing_radius = 0.1;

  try {
    const auto r = plan(truth, Configuration{0.1, 0.5}, Configuration{0.9, 0.5}, cfg);
    std::cout << "status " << to_string(r.status) << ", " << r.segments.size() << " segments\n";
    std::cout << trajectory_csv(r) << metrics_csv(r);
    return r.status == PlanStatus::success ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
