#pragma once

// Upwind finite-volume Fokker-Planck flow on a lattice graph with explicit
// Euler stepping.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fpplan/config_space.hpp"
#include "fpplan/environment.hpp"
#include "fpplan/error.hpp"
#include "fpplan/feasibility.hpp"
#include "fpplan/search_graph.hpp"

namespace fpplan {

/// Nodes with potentials and symmetric adjacency. Grid lattices also carry
/// coordinates and integer keys; abstract lattices (used for small
/// hand-built cases) carry neither.
struct Lattice {
  double dx = 1.0;
  std::vector<double> potential;
  std::vector<std::vector<std::size_t>> nbrs;  // ascending per node
  std::vector<Configuration> coords;           // empty for abstract lattices
  std::vector<LatticeKey> keys;
  std::unordered_map<LatticeKey, std::size_t, LatticeKeyHash> index;
  Configuration anchor;
  std::optional<PotentialField> field;

  std::size_t size() const noexcept { return potential.size(); }
  bool has_coords() const noexcept { return !coords.empty(); }

  std::optional<std::size_t> node_at(const LatticeKey& k) const {
    const auto it = index.find(k);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  /// Feasible node nearest to `x` (ties: lowest index).
  std::size_t nearest_node(const Configuration& x) const {
    require(has_coords() && size() > 0, ErrorKind::invalid_argument, "lattice has no coordinates");
    std::size_t best = 0;
    double bd = kInf;
    for (std::size_t j = 0; j < size(); ++j) {
      const double d = distance(coords[j], x);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    return best;
  }

  /// Graph with the given potentials and undirected edges.
  static Lattice abstract(std::vector<double> potentials, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                          double dx = 1.0) {
    Lattice lat;
    lat.dx = dx;
    lat.potential = std::move(potentials);
    lat.nbrs.assign(lat.size(), {});
    for (const auto& [a, b] : edges) {
      require(a < lat.size() && b < lat.size() && a != b, ErrorKind::invalid_argument, "bad lattice edge");
      lat.nbrs[a].push_back(b);
      lat.nbrs[b].push_back(a);
    }
    for (auto& nb : lat.nbrs) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return lat;
  }

  /// Path graph 0 - 1 - ... - (m-1).
  static Lattice chain(std::vector<double> potentials, double dx = 1.0) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t j = 1; j < potentials.size(); ++j) edges.emplace_back(j - 1, j);
    return abstract(std::move(potentials), edges, dx);
  }
};

inline constexpr std::size_t kMaxLatticeDim = 3;

/// Feasible points of the axis-aligned grid of pitch dx through `anchor`,
/// inside the workspace; edges join axis neighbours whose segment is
/// feasible. Nodes are ordered lexicographically by key, first axis slowest.
inline Lattice build_lattice(const KnownEnvironment& env, const Configuration& anchor, double dx,
                             const PotentialField& field) {
  const auto& truth = env.truth();
  const std::size_t n = truth.config_dim();
  check_same_dim(anchor.size(), n, "build_lattice");
  require(n <= kMaxLatticeDim, ErrorKind::invalid_argument,
          "lattice construction is limited to 3 configuration dimensions (got " + std::to_string(n) + ")");
  require(dx > 0.0, ErrorKind::validation, "lattice pitch must be positive");

  const std::size_t wdim = truth.workspace_dim();
  std::vector<std::int64_t> lo(n);
  std::vector<std::int64_t> hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t axis = i % wdim;
    lo[i] = static_cast<std::int64_t>(std::ceil((truth.workspace().lo[axis] - anchor[i]) / dx - 1e-9));
    hi[i] = static_cast<std::int64_t>(std::floor((truth.workspace().hi[axis] - anchor[i]) / dx + 1e-9));
  }

  Lattice lat;
  lat.dx = dx;
  lat.anchor = anchor;
  lat.field = field;
  for (std::size_t i = 0; i < n; ++i) {
    if (lo[i] > hi[i]) return lat;
  }
  LatticeKey key(lo);
  for (bool more = true; more;) {
    Configuration x(anchor);
    for (std::size_t i = 0; i < n; ++i) x[i] = anchor[i] + dx * static_cast<double>(key[i]);
    if (point_feasible(x, env)) {
      lat.index.emplace(key, lat.size());
      lat.keys.push_back(key);
      lat.potential.push_back(field(x));
      lat.coords.push_back(std::move(x));
    }
    more = false;
    for (std::size_t i = n; i-- > 0;) {
      if (key[i] < hi[i]) {
        ++key[i];
        more = true;
        break;
      }
      key[i] = lo[i];
    }
  }

  lat.nbrs.assign(lat.size(), {});
  for (std::size_t j = 0; j < lat.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      LatticeKey up = lat.keys[j];
      ++up[i];
      const auto k = lat.node_at(up);
      if (!k) continue;
      if (!segment_feasible(lat.coords[j], lat.coords[*k], env)) continue;
      lat.nbrs[j].push_back(*k);
      lat.nbrs[*k].push_back(j);
    }
  }
  for (auto& nb : lat.nbrs) std::sort(nb.begin(), nb.end());
  return lat;
}

/// Nodes with no strictly lower neighbour.
inline std::vector<std::size_t> local_minimizers(const Lattice& lat) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < lat.size(); ++j) {
    bool lowest = true;
    for (const auto k : lat.nbrs[j]) {
      if (lat.potential[k] < lat.potential[j]) {
        lowest = false;
        break;
      }
    }
    if (lowest) out.push_back(j);
  }
  return out;
}

struct DensityField {
  std::vector<double> rho;
  double beta = 0.0;
};

/// Symmetric 0/1 weights, stored per node aligned with Lattice::nbrs.
struct ProjectionWeights {
  std::vector<std::vector<char>> d;

  bool on(std::size_t j, std::size_t slot) const { return d[j][slot] != 0; }
};

inline ProjectionWeights diffusion_weights(const Lattice& lat) {
  ProjectionWeights w;
  w.d.resize(lat.size());
  for (std::size_t j = 0; j < lat.size(); ++j) w.d[j].assign(lat.nbrs[j].size(), 1);
  return w;
}

/// For each node with lower neighbours, the edge(s) best aligned with the
/// descent direction -grad p carry weight 1; the weight is mirrored on the
/// reverse edge. Without coordinates the steepest potential drop is used.
inline ProjectionWeights gradient_weights(const Lattice& lat) {
  ProjectionWeights w;
  w.d.resize(lat.size());
  for (std::size_t j = 0; j < lat.size(); ++j) w.d[j].assign(lat.nbrs[j].size(), 0);
  auto slot_of = [&](std::size_t j, std::size_t k) {
    const auto& nb = lat.nbrs[j];
    return static_cast<std::size_t>(std::lower_bound(nb.begin(), nb.end(), k) - nb.begin());
  };
  for (std::size_t j = 0; j < lat.size(); ++j) {
    std::vector<double> grad;
    if (lat.has_coords() && lat.field) grad = lat.field->gradient(lat.coords[j].coords());
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t s = 0; s < lat.nbrs[j].size(); ++s) {
      const std::size_t k = lat.nbrs[j][s];
      if (!(lat.potential[k] < lat.potential[j])) continue;
      double score = lat.potential[k] - lat.potential[j];
      if (!grad.empty()) {
        score = 0.0;
        for (std::size_t i = 0; i < grad.size(); ++i) score += (lat.coords[k][i] - lat.coords[j][i]) * grad[i];
      }
      scored.emplace_back(score, s);
    }
    if (scored.empty()) continue;
    double best = kInf;
    for (const auto& sc : scored) best = std::min(best, sc.first);
    for (const auto& [score, s] : scored) {
      if (score > best + 1e-12 * std::max(1.0, std::abs(best))) continue;
      const std::size_t k = lat.nbrs[j][s];
      w.d[j][s] = 1;
      w.d[k][slot_of(k, j)] = 1;
    }
  }
  return w;
}

inline void check_field(const DensityField& f, const Lattice& lat) {
  require(f.rho.size() == lat.size(), ErrorKind::dimension_mismatch, "density size differs from lattice");
  require(f.beta >= 0.0, ErrorKind::invalid_argument, "beta must be non-negative");
}

/// F_j = p_j + beta (log rho_j + 1).
inline std::vector<double> energy_gradient(const DensityField& f, const Lattice& lat) {
  std::vector<double> F(lat.potential);
  if (f.beta > 0.0) {
    for (std::size_t j = 0; j < F.size(); ++j) {
      require(f.rho[j] > 0.0, ErrorKind::invalid_argument, "density must be positive when beta > 0");
      F[j] += f.beta * (std::log(f.rho[j]) + 1.0);
    }
  }
  return F;
}

inline double free_energy(const DensityField& f, const Lattice& lat) {
  check_field(f, lat);
  double e = 0.0;
  for (std::size_t j = 0; j < lat.size(); ++j) {
    e += lat.potential[j] * f.rho[j];
    if (f.beta > 0.0 && f.rho[j] > 0.0) e += f.beta * f.rho[j] * std::log(f.rho[j]);
  }
  return e;
}

namespace detail {

inline double pos(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace detail

/// d rho_j / dt of the upwind scheme.
inline std::vector<double> fpe_rate(const DensityField& f, const Lattice& lat, const ProjectionWeights& w) {
  check_field(f, lat);
  const auto F = energy_gradient(f, lat);
  const double inv = 1.0 / (lat.dx * lat.dx);
  std::vector<double> r(lat.size(), 0.0);
  for (std::size_t j = 0; j < lat.size(); ++j) {
    double in = 0.0;
    double out = 0.0;
    for (std::size_t s = 0; s < lat.nbrs[j].size(); ++s) {
      if (!w.on(j, s)) continue;
      const std::size_t k = lat.nbrs[j][s];
      in += detail::pos(F[k] - F[j]) * f.rho[k];
      out += detail::pos(F[j] - F[k]) * f.rho[j];
    }
    r[j] = (in - out) * inv;
  }
  return r;
}

/// Largest stable explicit step: 0.9 times the smaller of the outflow and
/// capacity bounds, times dx^2. When neither bound constrains the step the
/// result is dt_max (default dx^2).
inline double cfl_dt(const DensityField& f, const Lattice& lat, const ProjectionWeights& w,
                     double dt_max = -1.0) {
  check_field(f, lat);
  if (dt_max <= 0.0) dt_max = lat.dx * lat.dx;
  const auto F = energy_gradient(f, lat);
  double max_out = 0.0;
  double cap = kInf;
  for (std::size_t j = 0; j < lat.size(); ++j) {
    double out = 0.0;
    double in = 0.0;
    for (std::size_t s = 0; s < lat.nbrs[j].size(); ++s) {
      if (!w.on(j, s)) continue;
      const std::size_t k = lat.nbrs[j][s];
      out += detail::pos(F[j] - F[k]);
      in += detail::pos(F[k] - F[j]) * f.rho[k];
    }
    max_out = std::max(max_out, out);
    const double room = 1.0 - f.rho[j];
    if (in > 0.0 && room > 0.0) cap = std::min(cap, room / in);
  }
  const double bound1 = max_out > 0.0 ? 1.0 / max_out : kInf;
  const double bound = std::min(bound1, cap);
  if (!std::isfinite(bound)) return dt_max;
  return 0.9 * bound * lat.dx * lat.dx;
}

/// One forward Euler step. Negative or over-unit mass means the step broke
/// the stability bound.
inline DensityField fpe_step(const DensityField& f, const Lattice& lat, const ProjectionWeights& w, double dt) {
  require(dt > 0.0, ErrorKind::invalid_argument, "time step must be positive");
  check_field(f, lat);
  const auto F = energy_gradient(f, lat);
  const double c = dt / (lat.dx * lat.dx);
  DensityField out{f.rho, f.beta};
  for (std::size_t j = 0; j < lat.size(); ++j) {
    double in = 0.0;
    double leave = 0.0;
    for (std::size_t s = 0; s < lat.nbrs[j].size(); ++s) {
      if (!w.on(j, s)) continue;
      const std::size_t k = lat.nbrs[j][s];
      in += detail::pos(F[k] - F[j]) * f.rho[k];
      leave += detail::pos(F[j] - F[k]);
    }
    // Kept share plus inflow; the same Euler update as rho + dt * rate,
    // grouped so that tiny masses do not round below zero.
    out.rho[j] = f.rho[j] * (1.0 - c * leave) + c * in;
    if (out.rho[j] < 0.0 || out.rho[j] > 1.0 + 1e-12 || !std::isfinite(out.rho[j])) {
      fail(ErrorKind::cfl_violation, "mass left [0,1] at node " + std::to_string(j) + " (" +
                                         std::to_string(out.rho[j]) + "); time step too large");
    }
    if (f.beta > 0.0 && out.rho[j] == 0.0) {
      fail(ErrorKind::cfl_violation, "mass vanished at node " + std::to_string(j) + " with beta > 0");
    }
  }
  return out;
}

/// Exact t -> inf limit of the beta = 0 scheme from `f`. Mass only moves
/// strictly downhill, split by the edge rates (p_j - p_k), so one sweep in
/// order of decreasing potential settles every node.
inline DensityField steady_limit_beta0(const DensityField& f, const Lattice& lat, const ProjectionWeights& w) {
  check_field(f, lat);
  require(f.beta == 0.0, ErrorKind::invalid_argument, "limit sweep needs beta = 0");
  std::vector<std::size_t> order(lat.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lat.potential[a] > lat.potential[b]; });
  DensityField out = f;
  for (const auto j : order) {
    double total = 0.0;
    for (std::size_t s = 0; s < lat.nbrs[j].size(); ++s) {
      if (w.on(j, s)) total += detail::pos(lat.potential[j] - lat.potential[lat.nbrs[j][s]]);
    }
    if (total == 0.0 || out.rho[j] == 0.0) continue;
    for (std::size_t s = 0; s < lat.nbrs[j].size(); ++s) {
      if (!w.on(j, s)) continue;
      const std::size_t k = lat.nbrs[j][s];
      out.rho[k] += out.rho[j] * detail::pos(lat.potential[j] - lat.potential[k]) / total;
    }
    out.rho[j] = 0.0;
  }
  return out;
}

/// (1/K) exp(-p/beta) over the whole lattice.
inline DensityField gibbs(const Lattice& lat, double beta) {
  require(beta > 0.0, ErrorKind::invalid_argument, "Gibbs field needs beta > 0");
  DensityField f{std::vector<double>(lat.size()), beta};
  const double pmin = *std::min_element(lat.potential.begin(), lat.potential.end());
  double sum = 0.0;
  for (std::size_t j = 0; j < lat.size(); ++j) {
    f.rho[j] = std::exp(-(lat.potential[j] - pmin) / beta);
    sum += f.rho[j];
  }
  for (auto& r : f.rho) r /= sum;
  return f;
}

/// cfl_dt, further limited for beta > 0 by the linearised entropy term:
/// near equilibrium the fluxes vanish and cfl_dt alone grows without bound.
inline double stable_dt(const DensityField& f, const Lattice& lat, const ProjectionWeights& w, double dt_max = -1.0) {
  double dt = cfl_dt(f, lat, w, dt_max);
  if (f.beta > 0.0) {
    double stiff = 0.0;
    for (std::size_t j = 0; j < lat.size(); ++j) {
      double s = 0.0;
      for (std::size_t k_slot = 0; k_slot < lat.nbrs[j].size(); ++k_slot) {
        if (!w.on(j, k_slot)) continue;
        s += std::max(1.0, f.rho[lat.nbrs[j][k_slot]] / f.rho[j]);
      }
      stiff = std::max(stiff, s);
    }
    if (stiff > 0.0) dt = std::min(dt, lat.dx * lat.dx / (f.beta * stiff));
  }
  return dt;
}

struct EvolveOptions {
  double tol = 1e-10;
  std::size_t max_iters = 1'000'000;
  double dt_max = -1.0;  // see cfl_dt
};

struct EvolveReport {
  DensityField field;
  bool converged = false;
  double residual = kInf;  // final |d rho/dt|_inf
  std::size_t iterations = 0;
  double max_mass_error = 0.0;   // max |sum rho - 1| over all states
  double max_energy_rise = 0.0;  // largest per-step free-energy increase
  double min_rho = 1.0;
  double max_rho = 0.0;
};

/// Called after every accepted step with (step index, field, rate).
using EvolveObserver = std::function<void(std::size_t, const DensityField&, const std::vector<double>&)>;

/// Steps at stable_dt until |d rho/dt|_inf < tol.
/// The entropy term makes the explicit scheme stiff where rho is small;
/// the second limit bounds the local linearisation, and a step that would
/// raise the free energy is retried at half size.
inline EvolveReport evolve_to_steady(DensityField f, const Lattice& lat, const ProjectionWeights& w,
                                     const EvolveOptions& opt = {}, const EvolveObserver& observe = {}) {
  check_field(f, lat);
  require(opt.tol > 0.0, ErrorKind::invalid_argument, "tolerance must be positive");
  EvolveReport rep;
  auto audit = [&](const DensityField& g) {
    double sum = 0.0;
    for (const auto v : g.rho) {
      sum += v;
      rep.min_rho = std::min(rep.min_rho, v);
      rep.max_rho = std::max(rep.max_rho, v);
    }
    rep.max_mass_error = std::max(rep.max_mass_error, std::abs(sum - 1.0));
  };
  audit(f);

  double energy = free_energy(f, lat);
  for (std::size_t it = 0;; ++it) {
    const auto r = fpe_rate(f, lat, w);
    double res = 0.0;
    for (const auto v : r) res = std::max(res, std::abs(v));
    rep.residual = res;
    rep.iterations = it;
    if (res < opt.tol) {
      rep.converged = true;
      break;
    }
    if (it >= opt.max_iters) break;

    double dt = stable_dt(f, lat, w, opt.dt_max);

    DensityField next;
    double next_energy = 0.0;
    for (int tries = 0;; ++tries) {
      next = fpe_step(f, lat, w, dt);
      next_energy = free_energy(next, lat);
      if (next_energy <= energy + 1e-13 || tries >= 60) break;
      dt *= 0.5;
    }
    rep.max_energy_rise = std::max(rep.max_energy_rise, next_energy - energy);
    energy = next_energy;
    f = std::move(next);
    audit(f);
    if (observe) observe(it + 1, f, r);
  }
  rep.field = std::move(f);
  return rep;
}

}  // namespace fpplan
