#pragma once

// Rooted lattice tree grown by graph generation. Vertices live on
// {anchor + step * sum_i z_i N_i : z integer}; only the target may sit off
// the lattice.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fpplan/config_space.hpp"
#include "fpplan/error.hpp"

namespace fpplan {

using VertexId = std::size_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

using LatticeKey = std::vector<std::int64_t>;

struct LatticeKeyHash {
  std::size_t operator()(const LatticeKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto v : k) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// Orthonormal direction set; empty means the standard axes.
using Basis = std::vector<std::vector<double>>;

struct GenConfig {
  double step = 0.03;
  /// Radius for the final link to the target. Non-positive selects the
  /// default: `step` up to n = 4, and step*sqrt(n)/2 beyond, which is the
  /// largest distance from an arbitrary point to its nearest lattice node.
  double connect_radius = 0.0;
  std::size_t max_vertices = 2'000'000;
  Basis basis;

  double effective_connect_radius(std::size_t n) const {
    if (connect_radius > 0.0) return connect_radius;
    const double cover = step * std::sqrt(static_cast<double>(n)) / 2.0;
    return cover > step ? cover * (1.0 + 1e-9) : step;
  }

  void validate(std::size_t n) const {
    require(step > 0.0, ErrorKind::validation, "graph step must be positive");
    require(max_vertices >= 1, ErrorKind::validation, "max_vertices must be at least 1");
    if (basis.empty()) return;
    require(basis.size() == n, ErrorKind::validation, "basis must have n vectors");
    for (std::size_t i = 0; i < n; ++i) {
      require(basis[i].size() == n, ErrorKind::validation, "basis vector of wrong dimension");
      for (std::size_t j = 0; j < n; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += basis[i][k] * basis[j][k];
        const double want = i == j ? 1.0 : 0.0;
        require(std::abs(dot - want) < 1e-9, ErrorKind::validation, "basis is not orthonormal");
      }
    }
  }
};

struct Vertex {
  Configuration x;
  double potential = 0.0;
  VertexId ancestor = kNoVertex;
  bool expanded = false;
  bool on_lattice = true;
  LatticeKey key;  // empty for the off-lattice target
};

class SearchGraph {
 public:
  SearchGraph(Configuration anchor, double step, Basis basis, PotentialField field)
      : anchor_(std::move(anchor)), step_(step), basis_(std::move(basis)), field_(std::move(field)) {
    require(step_ > 0.0, ErrorKind::validation, "lattice step must be positive");
    check_same_dim(anchor_.size(), field_.target().size(), "SearchGraph");
  }

  std::size_t dim() const noexcept { return anchor_.size(); }
  const Configuration& anchor() const noexcept { return anchor_; }
  double step() const noexcept { return step_; }
  const Basis& basis() const noexcept { return basis_; }
  bool standard_basis() const noexcept { return basis_.empty(); }
  const PotentialField& field() const noexcept { return field_; }
  const Configuration& target() const noexcept { return field_.target(); }

  std::size_t size() const noexcept { return vertices_.size(); }
  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const Vertex& vertex(VertexId id) const { return vertices_.at(id); }
  VertexId root() const noexcept { return 0; }
  std::optional<VertexId> target_vertex() const noexcept { return target_id_; }
  bool contains_target() const noexcept { return target_id_.has_value(); }
  std::size_t edge_count() const noexcept { return vertices_.empty() ? 0 : vertices_.size() - 1; }

  /// Integer lattice coordinates of `x`. Throws a consistency error when a
  /// component sits more than a quarter step off the lattice.
  LatticeKey key_of(const Configuration& x) const {
    check_same_dim(x.size(), dim(), "lattice_key");
    LatticeKey key(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      double c = 0.0;
      if (basis_.empty()) {
        c = (x[i] - anchor_[i]) / step_;
      } else {
        for (std::size_t k = 0; k < dim(); ++k) c += (x[k] - anchor_[k]) * basis_[i][k];
        c /= step_;
      }
      const double r = std::round(c);
      if (std::abs(c - r) > 0.25) {
        fail(ErrorKind::consistency, "configuration is off the lattice in component " +
                                         std::to_string(i));
      }
      key[i] = static_cast<std::int64_t>(r);
    }
    return key;
  }

  /// Coordinates are always rebuilt from the integer key, never accumulated,
  /// so repeated steps cannot drift.
  Configuration point_at(const LatticeKey& key) const {
    Configuration x(anchor_);
    if (basis_.empty()) {
      for (std::size_t i = 0; i < dim(); ++i) x[i] = anchor_[i] + step_ * static_cast<double>(key[i]);
      return x;
    }
    for (std::size_t i = 0; i < dim(); ++i) {
      if (key[i] == 0) continue;
      for (std::size_t k = 0; k < dim(); ++k) {
        x[k] += step_ * static_cast<double>(key[i]) * basis_[i][k];
      }
    }
    return x;
  }

  std::optional<VertexId> find(const LatticeKey& key) const {
    const auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  VertexId add_root() {
    require(vertices_.empty(), ErrorKind::consistency, "root already present");
    return insert(LatticeKey(dim(), 0), kNoVertex);
  }

  /// Inserts a lattice vertex with the given ancestor. The key must be new.
  VertexId add_lattice_vertex(const LatticeKey& key, VertexId ancestor) {
    require(ancestor < vertices_.size(), ErrorKind::consistency, "ancestor does not exist");
    require(!index_.contains(key), ErrorKind::consistency, "duplicate lattice key");
    return insert(key, ancestor);
  }

  VertexId add_target(VertexId ancestor) {
    require(!target_id_, ErrorKind::consistency, "target already linked");
    require(ancestor < vertices_.size(), ErrorKind::consistency, "ancestor does not exist");
    Vertex v;
    v.x = field_.target();
    v.potential = 0.0;
    v.ancestor = ancestor;
    v.on_lattice = false;
    vertices_.push_back(std::move(v));
    target_id_ = vertices_.size() - 1;
    return *target_id_;
  }

  /// Root coincides with the target: the trivial one-vertex graph.
  void mark_root_as_target() {
    require(vertices_.size() == 1, ErrorKind::consistency, "root-as-target needs a lone root");
    target_id_ = 0;
  }

  void mark_expanded(VertexId id) { vertices_.at(id).expanded = true; }

 private:
  VertexId insert(const LatticeKey& key, VertexId ancestor) {
    Vertex v;
    v.x = point_at(key);
    v.potential = field_(v.x);
    v.ancestor = ancestor;
    v.key = key;
    vertices_.push_back(std::move(v));
    const VertexId id = vertices_.size() - 1;
    index_.emplace(key, id);
    return id;
  }

  Configuration anchor_;
  double step_;
  Basis basis_;
  PotentialField field_;
  std::vector<Vertex> vertices_;
  std::unordered_map<LatticeKey, VertexId, LatticeKeyHash> index_;
  std::optional<VertexId> target_id_;
};

inline LatticeKey lattice_key(const Configuration& x, const SearchGraph& g) { return g.key_of(x); }

/// Number of lattice points of pitch `step` anchored at `anchor` that fall
/// inside the workspace (standard axes), saturating at SIZE_MAX.
inline std::size_t lattice_capacity(const Workspace& ws, std::size_t robots,
                                    const Configuration& anchor, double step) {
  const std::size_t wdim = ws.dim();
  check_same_dim(anchor.size(), robots * wdim, "lattice_capacity");
  std::size_t total = 1;
  for (std::size_t i = 0; i < anchor.size(); ++i) {
    const std::size_t axis = i % wdim;
    const double lo = (ws.lo[axis] - anchor[i]) / step;
    const double hi = (ws.hi[axis] - anchor[i]) / step;
    const double count = std::floor(hi + 1e-9) - std::ceil(lo - 1e-9) + 1.0;
    if (count <= 0.0) return 0;
    const auto c = static_cast<std::size_t>(count);
    if (total > std::numeric_limits<std::size_t>::max() / c) return std::numeric_limits<std::size_t>::max();
    total *= c;
  }
  return total;
}

}  // namespace fpplan
