#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "lipdim/space.hpp"

namespace lipdim {

/// Disjoint sets with union by size and path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) { reset(n); }

  void reset(std::size_t n) {
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    size_.assign(n, 1);
    sets_ = n;
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Returns the surviving root, or the shared root when already joined.
  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --sets_;
    return a;
  }

  std::size_t set_size(std::size_t x) { return size_[find(x)]; }
  std::size_t sets() const { return sets_; }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::size_t sets_ = 0;
};

/// Candidate-pair enumeration for the threshold graph {d ≤ r} on a subset.
///
/// Rules with a coordinate search box are bucketed on up to three slots with
/// cells as wide as the box half-widths, so every pair within distance r lies
/// in the same or an adjacent cell. Other rules enumerate all pairs.
class NeighborGrid {
 public:
  NeighborGrid(const FiniteMetricSpace& space, std::span<const std::size_t> members, double r);

  bool bucketed() const { return bucketed_; }

  /// Calls f(a, b) with local indices a != b into `members`, each unordered
  /// candidate pair exactly once.
  template <class F>
  void for_each_candidate(F&& f) const {
    const std::size_t m = count_;
    if (!bucketed_) {
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) f(a, b);
      return;
    }
    const std::size_t cells = cell_keys_.size();
    for (std::size_t c = 0; c < cells; ++c) {
      const auto& key = cell_keys_[c];
      for (std::size_t i = cell_start_[c]; i < cell_start_[c + 1]; ++i)
        for (std::size_t j = i + 1; j < cell_start_[c + 1]; ++j) f(order_[i], order_[j]);
      for (const auto& off : offsets_) {
        Key nk{key[0] + off[0], key[1] + off[1], key[2] + off[2]};
        if (!(key < nk)) continue;
        auto it = std::lower_bound(cell_keys_.begin(), cell_keys_.end(), nk);
        if (it == cell_keys_.end() || *it != nk) continue;
        const auto o = static_cast<std::size_t>(it - cell_keys_.begin());
        for (std::size_t i = cell_start_[c]; i < cell_start_[c + 1]; ++i)
          for (std::size_t j = cell_start_[o]; j < cell_start_[o + 1]; ++j) f(order_[i], order_[j]);
      }
    }
  }

  /// Calls f(b) for every candidate neighbour b != a (local indices).
  template <class F>
  void for_each_near(std::size_t a, F&& f) const {
    if (!bucketed_) {
      for (std::size_t b = 0; b < count_; ++b)
        if (b != a) f(b);
      return;
    }
    const std::size_t c = cell_of_[a];
    for (std::size_t i = cell_start_[c]; i < cell_start_[c + 1]; ++i)
      if (order_[i] != a) f(order_[i]);
    const auto& key = cell_keys_[c];
    for (const auto& off : offsets_) {
      Key nk{key[0] + off[0], key[1] + off[1], key[2] + off[2]};
      auto it = std::lower_bound(cell_keys_.begin(), cell_keys_.end(), nk);
      if (it == cell_keys_.end() || *it != nk) continue;
      const auto o = static_cast<std::size_t>(it - cell_keys_.begin());
      for (std::size_t i = cell_start_[o]; i < cell_start_[o + 1]; ++i) f(order_[i]);
    }
  }

  /// Like for_each_candidate, but only for pairs currently in different sets
  /// of `uf` (indexed like `members`). Whole cell blocks and rows are skipped
  /// once they are known to lie in one set; `f` may unite.
  template <class F>
  void for_each_open_candidate(UnionFind& uf, F&& f) const {
    const std::size_t m = count_;
    if (!bucketed_) {
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
          if (uf.find(a) != uf.find(b)) f(a, b);
      return;
    }
    constexpr std::size_t kMixed = static_cast<std::size_t>(-1);
    auto uniform_root = [&](std::size_t c) {
      const std::size_t root = uf.find(order_[cell_start_[c]]);
      for (std::size_t i = cell_start_[c] + 1; i < cell_start_[c + 1]; ++i)
        if (uf.find(order_[i]) != root) return kMixed;
      return root;
    };
    auto block = [&](std::size_t c, std::size_t o) {
      std::size_t ro = uniform_root(o);
      if (ro != kMixed && (c == o || uniform_root(c) == uf.find(ro))) return;
      const std::size_t rep = order_[cell_start_[o]];
      std::size_t sets = uf.sets();
      for (std::size_t i = cell_start_[c]; i < cell_start_[c + 1]; ++i) {
        // Re-test o after merges; a uniform o lets whole rows be skipped.
        if (ro == kMixed && uf.sets() != sets) {
          sets = uf.sets();
          ro = uniform_root(o);
          if (ro != kMixed && c == o) return;
        }
        const std::size_t a = order_[i];
        if (ro != kMixed && uf.find(a) == uf.find(rep)) continue;
        for (std::size_t j = (c == o ? i + 1 : cell_start_[o]); j < cell_start_[o + 1]; ++j) {
          const std::size_t b = order_[j];
          if (uf.find(a) != uf.find(b)) f(a, b);
        }
      }
    };
    const std::size_t cells = cell_keys_.size();
    for (std::size_t c = 0; c < cells; ++c) {
      block(c, c);
      const auto& key = cell_keys_[c];
      for (const auto& off : offsets_) {
        Key nk{key[0] + off[0], key[1] + off[1], key[2] + off[2]};
        if (!(key < nk)) continue;
        auto it = std::lower_bound(cell_keys_.begin(), cell_keys_.end(), nk);
        if (it == cell_keys_.end() || *it != nk) continue;
        block(c, static_cast<std::size_t>(it - cell_keys_.begin()));
      }
    }
  }

 private:
  using Key = std::array<std::int64_t, 3>;

  std::size_t count_ = 0;
  bool bucketed_ = false;
  std::vector<std::size_t> order_;
  std::vector<Key> cell_keys_;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> cell_of_;  // per local index
  std::vector<Key> offsets_;
};

struct ComponentOptions {
  /// Components up to this size get exact diameters; larger ones get a
  /// multi-sweep lower bound and the result is flagged approximate.
  std::size_t exact_diameter_cap = 8192;
};

struct Diameter {
  double value = 0.0;
  std::size_t a = 0;  // positions realising the value
  std::size_t b = 0;
  bool exact = true;
};

Diameter set_diameter(const FiniteMetricSpace& space, std::span<const std::size_t> members,
                      std::size_t exact_cap = ComponentOptions{}.exact_diameter_cap);

/// r-components of one scale. Component ids are numbered in order of their
/// smallest member position.
struct ComponentPartition {
  double r = 0.0;
  std::vector<std::size_t> component;  // per analysed point
  std::vector<double> diameter;        // per component
  bool approximate = false;

  std::size_t count() const { return diameter.size(); }
  double max_diameter() const {
    return diameter.empty() ? 0.0 : *std::max_element(diameter.begin(), diameter.end());
  }
};

ComponentPartition r_components(const FiniteMetricSpace& space, double r,
                                const ComponentOptions& opts = {});

/// r-components of the sub-cloud `members` (positions in `space`).
/// `component` is indexed like `members`.
ComponentPartition components_of(const FiniteMetricSpace& space,
                                 std::span<const std::size_t> members, double r,
                                 const ComponentOptions& opts = {});

/// Largest r-component of a sub-cloud.
struct LargestComponent {
  double diameter = 0.0;
  std::size_t far_a = 0;  // positions in the space
  std::size_t far_b = 0;
  std::vector<std::size_t> members;  // positions, ascending
  bool exact = true;
};

/// Max r-component diameter of `members`; exact unless a component exceeds
/// the cap. Ties resolve to the component with the smallest member position.
LargestComponent largest_component(const FiniteMetricSpace& space,
                                   std::span<const std::size_t> members, double r,
                                   const ComponentOptions& opts = {});

/// An r-path from `from` to `to` inside `members` (positions), or empty when
/// none exists. The path follows the union-find spanning forest.
std::vector<std::size_t> r_path(const FiniteMetricSpace& space,
                                std::span<const std::size_t> members, double r, std::size_t from,
                                std::size_t to);

struct MergeEvent {
  double scale = 0.0;
  std::size_t left = 0;    // cluster ids: leaves are 0..n-1
  std::size_t right = 0;
  std::size_t merged = 0;  // n + event index
  double diameter = 0.0;
  bool diameter_exact = true;
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<MergeEvent> merges;  // non-decreasing scale
  bool approximate = false;
};

struct DendrogramOptions {
  /// Above this size merged diameters use the bound diam(A)+w+diam(B).
  std::size_t exact_cap = 50000;
};

/// Single-linkage merge tree: Kruskal over the complete graph, realised via
/// Prim's minimum spanning tree (equal edges ordered by (i, j)).
Dendrogram dendrogram(const FiniteMetricSpace& space, const DendrogramOptions& opts = {});

/// Partition obtained by applying every merge with scale ≤ r.
ComponentPartition cut(const Dendrogram& tree, double r);

/// Minimum spanning tree edges (i < j, weight) of the complete distance graph.
struct WeightedEdge {
  double weight = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
};
std::vector<WeightedEdge> minimum_spanning_tree(const FiniteMetricSpace& space);

/// Partitions at every ladder scale (returned in ladder order), computed in
/// one increasing sweep with union-find state and diameters carried along.
std::vector<ComponentPartition> components_profile(const FiniteMetricSpace& space,
                                                   const ScaleLadder& ladder,
                                                   const ComponentOptions& opts = {});

/// True when `fine` refines `coarse` (same analysed points).
bool refines(const ComponentPartition& fine, const ComponentPartition& coarse);

}  // namespace lipdim
