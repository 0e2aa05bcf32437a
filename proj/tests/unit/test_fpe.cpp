#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "fpplan/fpe.hpp"
#include "oracles.hpp"

using namespace fpplan;

namespace {

Lattice grid(std::size_t side, const Configuration& target, std::vector<ObstaclePrimitive> prims = {}) {
  auto truth = std::make_shared<const GroundTruth>(Workspace::unit(2), std::move(prims));
  const auto env = KnownEnvironment::omniscient(truth);
  return build_lattice(env, Configuration{0.0, 0.0}, 1.0 / static_cast<double>(side - 1), PotentialField(target));
}

DensityField delta(std::size_t n, std::size_t at, double beta = 0.0) {
  DensityField f{std::vector<double>(n, 0.0), beta};
  f.rho[at] = 1.0;
  return f;
}

double total(const DensityField& f) { return std::accumulate(f.rho.begin(), f.rho.end(), 0.0); }

}  // namespace

TEST(Lattice, GridSizeAndAdjacency) {
  const auto lat = grid(20, Configuration{0.5, 0.5});
  EXPECT_EQ(lat.size(), 400u);
  std::size_t edges = 0;
  for (const auto& nb : lat.nbrs) edges += nb.size();
  EXPECT_EQ(edges / 2, 2u * 19u * 20u);
}

TEST(Lattice, ObstacleRemovesNodesAndEdges) {
  const auto open = grid(11, Configuration{0.9, 0.9});
  const auto lat = grid(11, Configuration{0.9, 0.9}, {ObstaclePrimitive::make_box(Box{{0.25, 0.25}, {0.55, 0.55}}, true)});
  EXPECT_EQ(open.size() - lat.size(), 9u);  // nodes at 0.3, 0.4, 0.5 in each axis
}

TEST(Lattice, RefusesHighDimension) {
  auto truth = std::make_shared<const GroundTruth>(Workspace::unit(2), std::vector<ObstaclePrimitive>{}, 2);
  const auto env = KnownEnvironment::omniscient(truth);
  EXPECT_THROW(build_lattice(env, Configuration{0.1, 0.1, 0.2, 0.1}, 0.1, PotentialField(Configuration{0.9, 0.9, 0.8, 0.9})),
               Error);
}

TEST(FreeEnergy, Examples) {
  const auto lat = Lattice::chain({0.0, 2.0});
  EXPECT_DOUBLE_EQ(free_energy(delta(2, 1), lat), 2.0);
  const auto flat = Lattice::chain({0.0, 0.0});
  EXPECT_NEAR(free_energy(DensityField{{0.5, 0.5}, 1.0}, flat), -std::log(2.0), 1e-15);
}

TEST(FreeEnergy, GibbsIsTheMinimum) {
  const auto lat = Lattice::abstract({0.3, 0.0, 1.2, 0.7, 0.4}, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
  const double beta = 0.5;
  const auto g = fptest::gibbs_weights(lat.potential, beta);
  const double fmin = free_energy(DensityField{g, beta}, lat);

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> node(0, lat.size() - 1);
  DensityField f{std::vector<double>(lat.size()), beta};
  double s = 0.0;
  for (auto& v : f.rho) s += (v = 0.05 + u(rng));
  for (auto& v : f.rho) v /= s;
  double e = free_energy(f, lat);
  // Random mass transfers, kept only when they lower the free energy.
  for (int it = 0; it < 200000; ++it) {
    const auto a = node(rng), b = node(rng);
    if (a == b) continue;
    const double m = (it < 100000 ? 0.01 : 1e-4) * u(rng) * f.rho[a];
    DensityField t = f;
    t.rho[a] -= m;
    t.rho[b] += m;
    const double et = free_energy(t, lat);
    EXPECT_GE(et, fmin - 1e-12);
    if (et < e) {
      f = t;
      e = et;
    }
  }
  EXPECT_NEAR(e, fmin, 1e-7);
  EXPECT_NEAR(free_energy(gibbs(lat, beta), lat), fmin, 1e-14);
}

TEST(Cfl, TwoNodeHandValue) {
  const double dx = 0.5;
  const auto lat = Lattice::chain({0.0, 1.0}, dx);
  const auto w = diffusion_weights(lat);
  EXPECT_DOUBLE_EQ(cfl_dt(delta(2, 0), lat, w), 0.9 * dx * dx);
}

TEST(Cfl, ZeroFluxUsesCap) {
  const auto lat = Lattice::chain({0.3, 0.3, 0.3}, 0.2);
  EXPECT_DOUBLE_EQ(cfl_dt(DensityField{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.0}, lat, diffusion_weights(lat)), 0.04);
}

TEST(Cfl, AlwaysPositive) {
  const auto lat = grid(8, Configuration{0.3, 0.6});
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    DensityField f{std::vector<double>(lat.size()), k % 2 ? 0.0 : 0.2};
    double s = 0.0;
    for (auto& v : f.rho) s += (v = 1e-6 + u(rng) * u(rng));
    for (auto& v : f.rho) v /= s;
    EXPECT_GT(cfl_dt(f, lat, diffusion_weights(lat)), 0.0);
    EXPECT_GT(cfl_dt(f, lat, gradient_weights(lat)), 0.0);
  }
}

TEST(FpeStep, GibbsIsStationary) {
  const auto lat = grid(10, Configuration{0.31, 0.52});
  const auto g = gibbs(lat, 0.2);
  const auto w = diffusion_weights(lat);
  const double dt = stable_dt(g, lat, w);
  EXPECT_LE(dt, cfl_dt(g, lat, w));
  const auto next = fpe_step(g, lat, w, dt);
  for (std::size_t j = 0; j < lat.size(); ++j) EXPECT_NEAR(next.rho[j], g.rho[j], 1e-14);
}

TEST(FpeStep, DeltaFlowsOnlyDownhillAlongWeightedEdges) {
  const auto lat = grid(10, Configuration{0.9, 0.25});
  const auto w = gradient_weights(lat);
  const std::size_t src = 33;
  const auto f = delta(lat.size(), src);
  const auto next = fpe_step(f, lat, w, cfl_dt(f, lat, w));
  EXPECT_NEAR(total(next), 1.0, 1e-14);
  for (std::size_t j = 0; j < lat.size(); ++j) {
    if (j == src || next.rho[j] == 0.0) continue;
    const auto& nb = lat.nbrs[src];
    const auto it = std::find(nb.begin(), nb.end(), j);
    ASSERT_NE(it, nb.end()) << j;
    EXPECT_TRUE(w.on(src, static_cast<std::size_t>(it - nb.begin())));
    EXPECT_LT(lat.potential[j], lat.potential[src]);
  }
  EXPECT_LT(next.rho[src], 1.0);
}

TEST(FpeStep, OversizedStepIsCflViolation) {
  const auto lat = Lattice::chain({0.0, 1.0, 2.0}, 1.0);
  const auto w = diffusion_weights(lat);
  const auto f = delta(3, 2);
  try {
    fpe_step(f, lat, w, 4.0 * cfl_dt(f, lat, w));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::cfl_violation);
  }
}

TEST(GradientWeights, PicksSteepestDescentEdge) {
  // Target up and to the right of node (0,0) at a shallow angle: the +x edge
  // descends fastest.
  const auto lat = grid(5, Configuration{1.0, 0.2});
  const auto w = gradient_weights(lat);
  const auto j = *lat.node_at({0, 0});
  const auto right = *lat.node_at({1, 0});
  const auto up = *lat.node_at({0, 1});
  const auto& nb = lat.nbrs[j];
  for (std::size_t s = 0; s < nb.size(); ++s) {
    if (nb[s] == right) {
      EXPECT_TRUE(w.on(j, s));
    }
    if (nb[s] == up) {
      EXPECT_FALSE(w.on(j, s));
    }
  }
}

TEST(GradientWeights, ExactTiesAllCarryWeight) {
  const auto lat = Lattice::abstract({1.0, 0.5, 0.5}, {{0, 1}, {0, 2}});
  const auto w = gradient_weights(lat);
  EXPECT_TRUE(w.on(0, 0));
  EXPECT_TRUE(w.on(0, 1));
}

TEST(Evolve, ChainGibbsBetaOne) {
  const auto lat = Lattice::chain({0.0, 1.0, 2.0});
  const auto rep = evolve_to_steady(DensityField{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0}, lat, diffusion_weights(lat));
  ASSERT_TRUE(rep.converged);
  EXPECT_NEAR(rep.field.rho[0], 0.6652, 5e-5);
  EXPECT_NEAR(rep.field.rho[1], 0.2447, 5e-5);
  EXPECT_NEAR(rep.field.rho[2], 0.0900, 5e-5);
  const auto g = fptest::gibbs_weights(lat.potential, 1.0);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(rep.field.rho[j], g[j], 1e-9);
}

TEST(Evolve, ChainDescentCollectsAtMinimum) {
  const auto lat = Lattice::chain({0.0, 1.0, 2.0});
  const auto rep = evolve_to_steady(delta(3, 2), lat, gradient_weights(lat));
  ASSERT_TRUE(rep.converged);
  EXPECT_NEAR(rep.field.rho[0], 1.0, 1e-9);
}

TEST(Evolve, UniqueMinimumGivesDelta) {
  const auto lat = grid(8, Configuration{0.57, 0.71});
  DensityField f{std::vector<double>(lat.size(), 1.0 / static_cast<double>(lat.size())), 0.0};
  const auto rep = evolve_to_steady(f, lat, diffusion_weights(lat));
  ASSERT_TRUE(rep.converged);
  const auto mins = local_minimizers(lat);
  ASSERT_EQ(mins.size(), 1u);
  EXPECT_NEAR(rep.field.rho[mins[0]], 1.0, 1e-9);
}

TEST(Evolve, TwoBasinsKeepMassInItsOwnBasin) {
  const auto lat = Lattice::chain({0.0, 1.0, 2.0, 1.0, 0.5});
  const auto rep = evolve_to_steady(delta(5, 3), lat, diffusion_weights(lat));
  ASSERT_TRUE(rep.converged);
  EXPECT_NEAR(rep.field.rho[4], 1.0, 1e-9);
  EXPECT_EQ(rep.field.rho[0], 0.0);
}

TEST(Evolve, MassAndEnergyAudit) {
  const auto lat = grid(12, Configuration{0.2, 0.8});
  const auto w = diffusion_weights(lat);
  double last = kInf;
  double worst_rise = 0.0;
  // Mostly concentrated at node 5; beta > 0 needs every node positive.
  DensityField start{std::vector<double>(lat.size(), 0.1 / static_cast<double>(lat.size() - 1)), 0.1};
  start.rho[5] = 0.9;
  const auto rep = evolve_to_steady(start, lat, w, EvolveOptions{},
                                    [&](std::size_t, const DensityField& f, const std::vector<double>&) {
                                      EXPECT_NEAR(total(f), 1.0, 1e-12);
                                      const double e = free_energy(f, lat);
                                      worst_rise = std::max(worst_rise, e - last);
                                      last = e;
                                    });
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(worst_rise, 1e-12);
  EXPECT_LT(rep.max_mass_error, 1e-12);
}

TEST(Evolve, IterationCapReportsResidual) {
  const auto lat = grid(12, Configuration{0.2, 0.8});
  EvolveOptions opt;
  opt.max_iters = 5;
  const auto rep = evolve_to_steady(delta(lat.size(), 0, 0.0), lat, diffusion_weights(lat), opt);
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.iterations, 5u);
  EXPECT_GT(rep.residual, opt.tol);
}

TEST(SteadyLimit, RidgeSplitsByRate) {
  // Node 2 drops 1 to each side; nodes 1 and 3 drain into their basins.
  const auto lat = Lattice::chain({0.0, 1.0, 2.0, 1.0, 0.5});
  const auto w = diffusion_weights(lat);
  const auto lim = steady_limit_beta0(DensityField{std::vector<double>(5, 0.2), 0.0}, lat, w);
  EXPECT_EQ(lim.rho, (std::vector<double>{0.5, 0.0, 0.0, 0.0, 0.5}));
  const auto rep = evolve_to_steady(DensityField{std::vector<double>(5, 0.2), 0.0}, lat, w);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(rep.field.rho[j], lim.rho[j], 1e-9);
}

TEST(SteadyLimit, UnevenDropsSplitProportionally) {
  const auto lat = Lattice::abstract({1.0, 0.0, 0.5}, {{0, 1}, {0, 2}});
  const auto lim = steady_limit_beta0(delta(3, 0), lat, diffusion_weights(lat));
  EXPECT_NEAR(lim.rho[1], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(lim.rho[2], 1.0 / 3.0, 1e-15);
  EXPECT_THROW(steady_limit_beta0(delta(3, 0, 0.5), lat, diffusion_weights(lat)), Error);
}
