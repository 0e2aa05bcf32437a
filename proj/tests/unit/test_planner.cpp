#include <cmath>
#include <memory>
#include <set>

#include <gtest/gtest.h>

#include "fpplan/planner.hpp"
#include "oracles.hpp"
#include "worlds.hpp"

using namespace fpplan;

namespace {

std::shared_ptr<const GroundTruth> world(std::vector<ObstaclePrimitive> prims) {
  return std::make_shared<const GroundTruth>(Workspace::unit(2), std::move(prims));
}

ObstaclePrimitive hidden(double x0, double y0, double x1, double y1) {
  return ObstaclePrimitive::make_box(Box{{x0, y0}, {x1, y1}});
}

void expect_chained(const PlanResult& r) {
  for (std::size_t i = 1; i < r.segments.size(); ++i) {
    ASSERT_TRUE(r.segments[i - 1].motion.has_value());
    EXPECT_EQ(r.segments[i].start, r.segments[i - 1].motion->stop_point);
  }
  for (std::size_t k = 1; k < r.trajectory.size(); ++k) {
    EXPECT_LE(distance(r.trajectory[k - 1].x, r.trajectory[k].x), r.step / 10.0 + 1e-12);
    EXPECT_GE(r.trajectory[k].t, r.trajectory[k - 1].t);
  }
}

}  // namespace

TEST(MoveAlong, UnblockedReachesEnd) {
  KnownEnvironment known(world({}), 0.06, 0.003);
  PlannerConfig cfg;
  const std::vector<Configuration> poly{{0.1, 0.1}, {0.13, 0.1}, {0.13, 0.13}};
  const auto m = move_along(poly, known, cfg);
  EXPECT_EQ(m.status, MotionStatus::reached_target);
  EXPECT_EQ(m.traversed.front(), poly.front());
  EXPECT_EQ(m.traversed.back(), poly.back());
  EXPECT_EQ(m.traversed.size(), 21u);
  EXPECT_EQ(m.stop_point, poly.back());
}

TEST(MoveAlong, StopsInsideClearanceBand) {
  const double R = 0.06, l = 0.03, delta = l / 10.0;
  for (const double entry : {0.5, 0.5013, 0.5051, 0.517}) {
    KnownEnvironment known(world({hidden(entry, 0.4, entry + 0.1, 0.6)}), R, delta);
    PlannerConfig cfg;
    cfg.sensing_radius = R;
    const std::vector<Configuration> poly{{0.1, 0.5}, {0.9, 0.5}};
    const auto m = move_along(poly, known, cfg);
    ASSERT_EQ(m.status, MotionStatus::blocked) << entry;
    EXPECT_GE(m.stop_clearance, 0.5 * R - delta) << entry;
    EXPECT_LE(m.stop_clearance, R) << entry;
    EXPECT_NEAR(m.stop_clearance, entry - m.stop_point[0], 1e-12);
    EXPECT_EQ(m.blockers, (std::vector<std::size_t>{0}));
    EXPECT_LT(m.stop_point[0], entry);
  }
}

TEST(MoveAlong, SideObstacleDoesNotStopMotion) {
  // Revealed, but clear of the path: no stop.
  KnownEnvironment known(world({hidden(0.4, 0.52, 0.6, 0.6)}), 0.06, 0.003);
  PlannerConfig cfg;
  const auto m = move_along({{0.1, 0.5}, {0.9, 0.5}}, known, cfg);
  EXPECT_EQ(m.status, MotionStatus::reached_target);
  EXPECT_EQ(m.revealed.size(), 1u);
}

TEST(MoveAlong, SnapStopsOnPathVertex) {
  KnownEnvironment known(world({hidden(0.5, 0.4, 0.6, 0.6)}), 0.06, 0.003);
  PlannerConfig cfg;
  cfg.snap_stops_to_lattice = true;
  std::vector<Configuration> poly;
  for (int k = 0; k <= 20; ++k) poly.push_back(Configuration{0.2 + 0.03 * k, 0.5});
  const auto m = move_along(poly, known, cfg);
  ASSERT_NE(m.status, MotionStatus::reached_target);
  bool on_vertex = false;
  for (const auto& p : poly) on_vertex = on_vertex || distance(p, m.stop_point) < 1e-12;
  EXPECT_TRUE(on_vertex);
  EXPECT_LT(m.stop_point[0], 0.5);
}

TEST(Plan, EmptyEnvironmentOneSegment) {
  PlannerConfig cfg;
  const auto r = plan(world({}), Configuration{0.1, 0.1}, Configuration{0.5, 0.4}, cfg);
  EXPECT_EQ(r.status, PlanStatus::success);
  ASSERT_EQ(r.segments.size(), 1u);
  EXPECT_EQ(r.trajectory.back().x, (Configuration{0.5, 0.4}));
  EXPECT_EQ(r.segments[0].motion->status, MotionStatus::reached_target);
  const auto m = r.metrics();
  EXPECT_EQ(m.num_graphs, 1u);
  EXPECT_FALSE(m.trapped);
  // Axis staircase: every sample moves along one coordinate only.
  for (std::size_t k = 1; k + 1 < r.trajectory.size(); ++k) {
    const auto& a = r.trajectory[k - 1].x;
    const auto& b = r.trajectory[k].x;
    const bool dx = std::abs(a[0] - b[0]) > 1e-15, dy = std::abs(a[1] - b[1]) > 1e-15;
    EXPECT_FALSE(dx && dy);
  }
}

TEST(Plan, SealedTargetNoPath) {
  auto s = fptest::sealed(5);
  const auto r = plan(make_truth(s), Configuration(s.start), Configuration(s.target), planner_config(s));
  EXPECT_EQ(r.status, PlanStatus::no_feasible_path);
  EXPECT_EQ(r.segments.size(), 1u);
  EXPECT_FALSE(r.segments[0].graph.connected());
}

TEST(Plan, CentralBoxMaze) {
  fpplan::Scenario s = fptest::unit_square("central");
  s.obstacles = {fptest::box(0.35, 0.3, 0.65, 0.7), fptest::box(0.2, 0.15, 0.8, 0.18), fptest::box(0.2, 0.82, 0.8, 0.85)};
  s.start = {0.1, 0.48};
  s.target = {0.9, 0.52};
  s.sensing_radius = 0.06;
  const auto r = plan(make_truth(s), Configuration(s.start), Configuration(s.target), planner_config(s));
  ASSERT_EQ(r.status, PlanStatus::success);
  EXPECT_GE(r.segments.size(), 2u);
  std::size_t blocked = 0;
  for (const auto& seg : r.segments) blocked += seg.motion && seg.motion->status == MotionStatus::blocked;
  EXPECT_GE(blocked, 1u);
  expect_chained(r);
}

TEST(Plan, MazeInvariants) {
  for (std::uint32_t seed = 1; seed <= 8; ++seed) {
    const auto s = fptest::maze(seed, fptest::maze_spec_for(seed));
    const auto cfg = planner_config(s);
    const auto r = plan(make_truth(s), Configuration(s.start), Configuration(s.target), cfg);
    ASSERT_EQ(r.status, PlanStatus::success) << s.name;
    EXPECT_EQ(r.trajectory.back().x, Configuration(s.target));
    expect_chained(r);

    std::vector<Configuration> poly;
    for (const auto& p : r.trajectory) poly.push_back(p.x);
    EXPECT_LT(fptest::first_collision(poly, 1, 2, fptest::boxes_of(s), s.workspace_lo, s.workspace_hi, cfg.delta() / 10),
              0.0)
        << s.name;

    // Each blocked stop is caused by a primitive the segment's graph did not know.
    std::set<std::size_t> seen;
    for (const auto& seg : r.segments) {
      for (std::size_t k = 0; k < seg.revealed_count; ++k) seen.insert(r.known->revealed()[k]);
      if (!seg.motion || seg.motion->status == MotionStatus::reached_target) continue;
      const double R = s.sensing_radius;
      EXPECT_GT(seg.motion->stop_clearance, 0.0);
      EXPECT_LE(seg.motion->stop_clearance, R);
      bool fresh = false;
      for (const auto b : seg.motion->blockers) fresh = fresh || !seen.count(b);
      EXPECT_TRUE(fresh) << s.name;
    }
    const auto m = r.metrics();
    double sum = 0.0;
    for (const auto& seg : r.segments) sum += static_cast<double>(seg.graph.graph.size());
    EXPECT_EQ(m.avg_vertices, sum / static_cast<double>(r.segments.size()));
  }
}

TEST(Plan, Deterministic) {
  const auto s = fptest::maze(3, fptest::maze_spec_for(3));
  const auto a = plan(make_truth(s), Configuration(s.start), Configuration(s.target), planner_config(s));
  const auto b = plan(make_truth(s), Configuration(s.start), Configuration(s.target), planner_config(s));
  ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
  for (std::size_t k = 0; k < a.trajectory.size(); ++k) EXPECT_EQ(a.trajectory[k].x, b.trajectory[k].x);
}

TEST(Plan, StartInsideHiddenObstacleIsModelViolation) {
  PlannerConfig cfg;
  try {
    plan(world({hidden(0.05, 0.05, 0.2, 0.2)}), Configuration{0.1, 0.1}, Configuration{0.9, 0.9}, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::model_violation);
  }
}

TEST(Plan, IterationCapIsResourceLimit) {
  const auto s = fptest::maze(1001, fptest::MazeSpec{});
  auto cfg = planner_config(s);
  cfg.max_iterations = 1;
  const auto r = plan(make_truth(s), Configuration(s.start), Configuration(s.target), cfg);
  EXPECT_EQ(r.status, PlanStatus::resource_limit);
}

TEST(Plan, VertexBudgetIsResourceLimit) {
  auto s = fptest::sealed(9);
  auto cfg = planner_config(s);
  cfg.gen.max_vertices = 100;
  const auto r = plan(make_truth(s), Configuration(s.start), Configuration(s.target), cfg);
  EXPECT_EQ(r.status, PlanStatus::resource_limit);
}

TEST(PlannerConfig, SensingRadiusMustExceedMotionStep) {
  PlannerConfig cfg;
  cfg.sensing_radius = 0.002;
  EXPECT_THROW(cfg.validate(2), Error);
  cfg.sensing_radius = 0.06;
  cfg.stop_fraction = 1.0;
  EXPECT_THROW(cfg.validate(2), Error);
}
