#pragma once

// Bounded search region: alternate greedy descent (beta = 0) and diffusive
// spreading (beta > 0) over the lattice until the target node is covered,
// then take the union of boxes around the collected nodes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fpplan/config_space.hpp"
#include "fpplan/error.hpp"
#include "fpplan/fpe.hpp"
#include "fpplan/search_graph.hpp"

namespace fpplan {

struct Region {
  std::vector<char> member;
  std::vector<std::size_t> nodes;  // insertion order

  explicit Region(std::size_t lattice_size = 0) : member(lattice_size, 0) {}

  bool contains(std::size_t j) const { return member[j] != 0; }
  std::size_t size() const noexcept { return nodes.size(); }
  bool add(std::size_t j) {
    if (member[j]) return false;
    member[j] = 1;
    nodes.push_back(j);
    return true;
  }
};

inline constexpr double kRateThreshold = 1e-14;

/// Nodes whose density ever grows while a unit mass at `start` descends
/// with beta = 0 along the gradient-projected edges. `start` is included.
inline std::vector<std::size_t> gradient_region(std::size_t start, const Lattice& lat, const EvolveOptions& opt = {}) {
  require(start < lat.size(), ErrorKind::invalid_argument, "start node outside the lattice");
  const auto w = gradient_weights(lat);
  std::vector<char> hit(lat.size(), 0);
  std::vector<std::size_t> out{start};
  hit[start] = 1;
  auto collect = [&](const std::vector<double>& r) {
    double peak = 0.0;
    for (const auto v : r) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (!hit[j] && r[j] > kRateThreshold * peak) {
        hit[j] = 1;
        out.push_back(j);
      }
    }
  };
  DensityField f{std::vector<double>(lat.size(), 0.0), 0.0};
  f.rho[start] = 1.0;
  const auto rep = evolve_to_steady(f, lat, w, opt, [&](std::size_t, const DensityField&, const std::vector<double>& r) { collect(r); });
  collect(fpe_rate(rep.field, lat, w));
  return out;
}

struct DiffusionStep {
  std::vector<std::size_t> layers;  // one node per layer, in order
  std::optional<std::size_t> next_start;
  bool evolved = false;
  bool converged = true;
  double residual = 0.0;
};

inline bool has_lower_outside(const Lattice& lat, const std::vector<char>& claimed, std::size_t j) {
  for (const auto k : lat.nbrs[j]) {
    if (!claimed[k] && lat.potential[k] < lat.potential[j]) return true;
  }
  return false;
}

/// Lowest-potential node adjacent to the claimed set (ties: lowest index).
inline std::optional<std::size_t> lowest_outside_neighbor(const Lattice& lat, const std::vector<char>& claimed) {
  std::optional<std::size_t> best;
  for (std::size_t j = 0; j < lat.size(); ++j) {
    if (!claimed[j]) continue;
    for (const auto k : lat.nbrs[j]) {
      if (claimed[k]) continue;
      if (!best || lat.potential[k] < lat.potential[*best] ||
          (lat.potential[k] == lat.potential[*best] && k < *best)) {
        best = k;
      }
    }
  }
  return best;
}

/// Grows `prev` one node per layer in order of steady diffusive density
/// until a layer node has an unclaimed lower neighbour. Returns the layers
/// and the lowest unclaimed neighbour as the next descent start.
inline DiffusionStep diffusion_region(const Region& prev, const Lattice& lat, double beta,
                                      std::optional<std::size_t> target_node = std::nullopt, double eps = 1e-6,
                                      const EvolveOptions& opt = {}) {
  require(beta > 0.0, ErrorKind::invalid_argument, "diffusion needs beta > 0");
  require(prev.size() > 0, ErrorKind::invalid_argument, "diffusion needs a non-empty region");
  DiffusionStep step;
  if (target_node && prev.contains(*target_node)) {
    step.next_start = target_node;
    return step;
  }
  std::vector<char> claimed(prev.member);
  for (const auto j : prev.nodes) {
    if (has_lower_outside(lat, claimed, j)) {
      step.next_start = lowest_outside_neighbor(lat, claimed);
      return step;
    }
  }

  const std::size_t inside = prev.size();
  const std::size_t outside = lat.size() - inside;
  if (outside == 0) return step;
  while ((1.0 - eps) / static_cast<double>(inside) <= eps / static_cast<double>(outside)) eps *= 0.5;
  DensityField f{std::vector<double>(lat.size(), eps / static_cast<double>(outside)), beta};
  for (const auto j : prev.nodes) f.rho[j] = (1.0 - eps) / static_cast<double>(inside);
  const auto rep = evolve_to_steady(std::move(f), lat, diffusion_weights(lat), opt);
  step.evolved = true;
  step.converged = rep.converged;
  step.residual = rep.residual;
  const auto& rho = rep.field.rho;

  // Max-heap on (rho, -index) over the unclaimed boundary.
  using Entry = std::pair<double, std::int64_t>;
  std::priority_queue<Entry> frontier;
  std::vector<char> queued(claimed);
  auto push_nbrs = [&](std::size_t j) {
    for (const auto k : lat.nbrs[j]) {
      if (queued[k]) continue;
      queued[k] = 1;
      frontier.emplace(rho[k], -static_cast<std::int64_t>(k));
    }
  };
  for (const auto j : prev.nodes) push_nbrs(j);
  while (true) {
    if (frontier.empty()) return step;  // component exhausted
    const auto x = static_cast<std::size_t>(-frontier.top().second);
    frontier.pop();
    claimed[x] = 1;
    step.layers.push_back(x);
    if ((target_node && x == *target_node) || has_lower_outside(lat, claimed, x)) break;
    push_nbrs(x);
  }
  step.next_start = lowest_outside_neighbor(lat, claimed);
  return step;
}

inline double default_region_beta(const Lattice& lat) {
  if (lat.size() == 0) return 1.0;
  const auto [lo, hi] = std::minmax_element(lat.potential.begin(), lat.potential.end());
  const double range = *hi - *lo;
  return range > 0.0 ? range / 10.0 : 1.0;
}

struct RegionRound {
  std::size_t start = 0;
  std::size_t gradient_nodes = 0;
  std::size_t diffusion_layers = 0;
  bool evolved = false;
};

struct RegionBuild {
  Region region;
  std::size_t start_node = 0;
  std::size_t target_node = 0;
  double beta = 0.0;
  std::vector<RegionRound> rounds;
};

/// Alternates descent and diffusion rounds until `target_node` joins.
inline RegionBuild build_Rf(std::size_t start_node, std::size_t target_node, const Lattice& lat, double beta = 0.0,
                            const EvolveOptions& opt = {}) {
  require(start_node < lat.size() && target_node < lat.size(), ErrorKind::invalid_argument,
          "start or target node outside the lattice");
  RegionBuild b;
  b.region = Region(lat.size());
  b.start_node = start_node;
  b.target_node = target_node;
  b.beta = beta > 0.0 ? beta : default_region_beta(lat);

  std::size_t x = start_node;
  for (std::size_t round = 0; round <= lat.size(); ++round) {
    RegionRound log;
    log.start = x;
    for (const auto j : gradient_region(x, lat, opt)) {
      if (b.region.add(j)) ++log.gradient_nodes;
    }
    if (b.region.contains(target_node)) {
      b.rounds.push_back(log);
      return b;
    }
    const auto d = diffusion_region(b.region, lat, b.beta, target_node, 1e-6, opt);
    for (const auto j : d.layers) b.region.add(j);
    log.diffusion_layers = d.layers.size();
    log.evolved = d.evolved;
    b.rounds.push_back(log);
    if (b.region.contains(target_node)) return b;
    if (!d.next_start) {
      fail(ErrorKind::structural, "target node is not reachable on the lattice (region stalled after " +
                                      std::to_string(b.region.size()) + " nodes)");
    }
    x = *d.next_start;
  }
  fail(ErrorKind::structural, "region construction exceeded the lattice size in rounds");
}

/// Union of closed axis-aligned boxes of equal half-width, hashed on a grid
/// of the box pitch for point queries.
class BoxUnion {
 public:
  BoxUnion(std::vector<Configuration> centers, double half_width, Configuration origin, double pitch)
      : centers_(std::move(centers)), half_width_(half_width), origin_(std::move(origin)), pitch_(pitch) {
    require(pitch_ > 0.0 && half_width_ >= 0.0, ErrorKind::invalid_argument, "bad box union geometry");
    reach_ = static_cast<std::int64_t>(std::ceil(half_width_ / pitch_)) + 1;
    for (std::size_t c = 0; c < centers_.size(); ++c) cells_[cell_of(centers_[c])].push_back(c);
  }

  const std::vector<Configuration>& centers() const noexcept { return centers_; }
  double half_width() const noexcept { return half_width_; }

  bool contains(const Configuration& x) const {
    const auto base = cell_of(x);
    LatticeKey k(base);
    return scan(x, base, k, 0);
  }

 private:
  LatticeKey cell_of(const Configuration& x) const {
    LatticeKey k(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) k[i] = static_cast<std::int64_t>(std::llround((x[i] - origin_[i]) / pitch_));
    return k;
  }

  bool scan(const Configuration& x, const LatticeKey& base, LatticeKey& k, std::size_t axis) const {
    if (axis == base.size()) {
      const auto it = cells_.find(k);
      if (it == cells_.end()) return false;
      for (const auto c : it->second) {
        bool in = true;
        for (std::size_t i = 0; i < x.size() && in; ++i) in = std::abs(x[i] - centers_[c][i]) <= half_width_ + 1e-9;
        if (in) return true;
      }
      return false;
    }
    for (std::int64_t d = -reach_; d <= reach_; ++d) {
      k[axis] = base[axis] + d;
      if (scan(x, base, k, axis + 1)) return true;
    }
    k[axis] = base[axis];
    return false;
  }

  std::vector<Configuration> centers_;
  double half_width_;
  Configuration origin_;
  double pitch_;
  std::int64_t reach_ = 1;
  std::unordered_map<LatticeKey, std::vector<std::size_t>, LatticeKeyHash> cells_;
};

/// Boxes of half-width `half_width` around the region nodes, optionally
/// translated by `shift` in every coordinate.
inline BoxUnion region_boxes(const Region& region, const Lattice& lat, double half_width, double shift = 0.0) {
  require(lat.has_coords(), ErrorKind::invalid_argument, "region boxes need a coordinate lattice");
  std::vector<Configuration> centers;
  centers.reserve(region.size());
  for (const auto j : region.nodes) {
    Configuration c = lat.coords[j];
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += shift;
    centers.push_back(std::move(c));
  }
  return BoxUnion(std::move(centers), half_width, lat.anchor, lat.dx);
}

inline bool contains_path(const BoxUnion& boxes, const std::vector<Configuration>& trajectory) {
  for (const auto& x : trajectory) {
    if (!boxes.contains(x)) return false;
  }
  return true;
}

}  // namespace fpplan
