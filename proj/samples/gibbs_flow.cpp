// Evolves a point mass on a grid lattice toward its Gibbs distribution and
// reports the free energy along the way.

#include <cstdio>
#include <memory>

#include "fpplan/fpplan.hpp"

int main() {
  using namespace fpplan;
  auto truth = std::make_shared<const GroundTruth>(Workspace::unit(2), std::vector<ObstaclePrimitive>{});
  const auto env = KnownEnvironment::omniscient(truth);
  const auto lat = build_lattice(env, Configuration{0.0, 0.0}, 0.1, PotentialField(Configuration{0.7, 0.3}));

  const double beta = 0.2;
  DensityField start{std::vector<double>(lat.size(), 1e-3 / static_cast<double>(lat.size() - 1)), beta};
  start.rho[0] = 1.0 - 1e-3;

  const auto rep = evolve_to_steady(start, lat, diffusion_weights(lat), EvolveOptions{},
                                    [&](std::size_t it, const DensityField& f, const std::vector<double>&) {
                                      if (it % 200 == 0) std::printf("step %zu  free energy %.9f\n", it, free_energy(f, lat));
                                    });
  std::printf("converged %d after %zu steps, residual %.3g\n", rep.converged ? 1 : 0, rep.iterations, rep.residual);
  return rep.converged ? 0 : 1;
}
