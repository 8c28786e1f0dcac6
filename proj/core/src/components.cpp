#include "lipdim/components.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace lipdim {

// ---------------------------------------------------------------------------
// NeighborGrid

NeighborGrid::NeighborGrid(const FiniteMetricSpace& space, std::span<const std::size_t> members,
                           double r)
    : count_(members.size()) {
  if (members.size() < 64) return;  // exhaustive is cheaper than bucketing
  std::vector<double> lo, hi;
  space.bounds(members, lo, hi);
  const RulePtr& rule = space.rule();
  auto box = rule->search_box(r * (1.0 + 4 * kDistanceTol), lo, hi);
  if (!box) return;

  // Pick up to three slots that split the cloud into the most cells.
  struct Slot {
    std::size_t slot;
    double width;
    double cells;
  };
  std::vector<Slot> slots;
  for (std::size_t k = 0; k < box->size(); ++k) {
    const std::size_t slot = rule->offset() + k;
    const double w = (*box)[k];
    if (!(w > 0.0) || !std::isfinite(w)) continue;
    const double extent = hi[slot] - lo[slot];
    slots.push_back({slot, w, extent / w});
  }
  std::stable_sort(slots.begin(), slots.end(),
                   [](const Slot& a, const Slot& b) { return a.cells > b.cells; });
  if (slots.size() > 3) slots.resize(3);
  if (slots.empty()) return;

  // Crowded boxes get cells of width w/q: cell-mates are then usually within
  // r, so cells turn uniform early and the open-candidate scan skips them.
  double estimate = 1.0;
  for (const auto& s : slots) estimate *= std::max(1.0, s.cells);
  int q = 1;
  while (q < 4 && static_cast<double>(count_) / (estimate * std::pow(q, slots.size())) > 32.0) ++q;
  if (slots.front().cells * q < 2.0) return;
  bucketed_ = true;
  for (auto& s : slots) s.width /= q;

  std::vector<std::pair<Key, std::size_t>> keyed(count_);
  for (std::size_t a = 0; a < count_; ++a) {
    auto c = space.coords(members[a]);
    Key key{0, 0, 0};
    for (std::size_t s = 0; s < slots.size(); ++s)
      key[s] = static_cast<std::int64_t>(std::floor((c[slots[s].slot] - lo[slots[s].slot]) / slots[s].width));
    keyed[a] = {key, a};
  }
  std::sort(keyed.begin(), keyed.end());
  order_.resize(count_);
  cell_of_.resize(count_);
  for (std::size_t a = 0; a < count_; ++a) {
    order_[a] = keyed[a].second;
    if (a == 0 || keyed[a].first != keyed[a - 1].first) {
      cell_keys_.push_back(keyed[a].first);
      cell_start_.push_back(a);
    }
    cell_of_[order_[a]] = cell_keys_.size() - 1;
  }
  cell_start_.push_back(count_);

  const int dims = static_cast<int>(slots.size());
  for (int dx = -q; dx <= q; ++dx)
    for (int dy = (dims > 1 ? -q : 0); dy <= (dims > 1 ? q : 0); ++dy)
      for (int dz = (dims > 2 ? -q : 0); dz <= (dims > 2 ? q : 0); ++dz)
        if (dx != 0 || dy != 0 || dz != 0) offsets_.push_back({dx, dy, dz});
}

// ---------------------------------------------------------------------------
// Diameters

namespace {

Diameter sweep_diameter(const FiniteMetricSpace& space, std::span<const std::size_t> members) {
  Diameter best;
  best.exact = false;
  best.a = best.b = members.front();
  std::size_t from = members.front();
  for (int sweep = 0; sweep < 4; ++sweep) {
    std::size_t far = from;
    double dist = -1.0;
    for (std::size_t q : members) {
      const double d = space.d(from, q);
      if (d > dist) {
        dist = d;
        far = q;
      }
    }
    if (dist > best.value) {
      best.value = dist;
      best.a = std::min(from, far);
      best.b = std::max(from, far);
    }
    from = far;
  }
  return best;
}

}  // namespace

Diameter set_diameter(const FiniteMetricSpace& space, std::span<const std::size_t> members,
                      std::size_t exact_cap) {
  Diameter best;
  if (members.empty()) return best;
  best.a = best.b = members.front();
  if (members.size() > exact_cap) return sweep_diameter(space, members);
  for (std::size_t x = 0; x < members.size(); ++x)
    for (std::size_t y = x + 1; y < members.size(); ++y) {
      const double d = space.d(members[x], members[y]);
      if (d > best.value) {
        best.value = d;
        best.a = std::min(members[x], members[y]);
        best.b = std::max(members[x], members[y]);
      }
    }
  return best;
}

// ---------------------------------------------------------------------------
// Single-scale components

namespace {

/// Union-find labels (local) for the threshold graph on members.
UnionFind link(const FiniteMetricSpace& space, std::span<const std::size_t> members, double r) {
  UnionFind uf(members.size());
  NeighborGrid grid(space, members, r);
  grid.for_each_open_candidate(uf, [&](std::size_t a, std::size_t b) {
    if (within(space.d(members[a], members[b]), r)) uf.unite(a, b);
  });
  return uf;
}

/// Groups local indices by root; groups ordered by smallest local index.
std::vector<std::vector<std::size_t>> groups_of(UnionFind& uf) {
  const std::size_t m = uf.size();
  std::vector<std::size_t> slot(m, std::numeric_limits<std::size_t>::max());
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t root = uf.find(a);
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = groups.size();
      groups.emplace_back();
    }
    groups[slot[root]].push_back(a);
  }
  return groups;
}

}  // namespace

ComponentPartition components_of(const FiniteMetricSpace& space,
                                 std::span<const std::size_t> members, double r,
                                 const ComponentOptions& opts) {
  if (!(r > 0.0)) throw std::domain_error("scale r must be positive");
  ComponentPartition part;
  part.r = r;
  part.component.assign(members.size(), 0);
  UnionFind uf = link(space, members, r);
  auto groups = groups_of(uf);
  std::vector<std::size_t> pos;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    pos.clear();
    for (std::size_t a : groups[g]) {
      part.component[a] = g;
      pos.push_back(members[a]);
    }
    const Diameter diam = set_diameter(space, pos, opts.exact_diameter_cap);
    part.diameter.push_back(diam.value);
    part.approximate = part.approximate || !diam.exact;
  }
  return part;
}

ComponentPartition r_components(const FiniteMetricSpace& space, double r,
                                const ComponentOptions& opts) {
  std::vector<std::size_t> all(space.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return components_of(space, all, r, opts);
}

LargestComponent largest_component(const FiniteMetricSpace& space,
                                   std::span<const std::size_t> members, double r,
                                   const ComponentOptions& opts) {
  if (!(r > 0.0)) throw std::domain_error("scale r must be positive");
  LargestComponent out;
  if (members.empty()) return out;
  UnionFind uf = link(space, members, r);
  auto groups = groups_of(uf);

  // Eccentricity of one member bounds the diameter within a factor of two.
  struct Candidate {
    std::size_t group;
    double lower;
    double upper;
  };
  std::vector<Candidate> cands;
  cands.reserve(groups.size());
  double best_lower = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::size_t anchor = members[groups[g].front()];
    double ecc = 0.0;
    for (std::size_t a : groups[g]) ecc = std::max(ecc, space.d(anchor, members[a]));
    cands.push_back({g, ecc, 2.0 * ecc});
    best_lower = std::max(best_lower, ecc);
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& x, const Candidate& y) { return x.upper > y.upper; });

  bool have = false;
  std::size_t best_group = 0;
  Diameter best;
  std::vector<std::size_t> pos;
  for (const auto& c : cands) {
    if (have && c.upper < best.value) break;
    if (c.upper < best_lower) break;
    pos.clear();
    for (std::size_t a : groups[c.group]) pos.push_back(members[a]);
    const Diameter diam = set_diameter(space, pos, opts.exact_diameter_cap);
    const bool better = !have || diam.value > best.value ||
                        (diam.value == best.value && c.group < best_group);
    if (better) {
      have = true;
      best = diam;
      best_group = c.group;
    }
    best_lower = std::max(best_lower, diam.value);
  }
  out.diameter = best.value;
  out.far_a = best.a;
  out.far_b = best.b;
  out.exact = best.exact;
  for (std::size_t a : groups[best_group]) out.members.push_back(members[a]);
  std::sort(out.members.begin(), out.members.end());
  return out;
}

std::vector<std::size_t> r_path(const FiniteMetricSpace& space,
                                std::span<const std::size_t> members, double r, std::size_t from,
                                std::size_t to) {
  const std::size_t m = members.size();
  std::size_t src = m, dst = m;
  for (std::size_t a = 0; a < m; ++a) {
    if (members[a] == from) src = a;
    if (members[a] == to) dst = a;
  }
  if (src == m || dst == m) return {};

  // Spanning forest of the threshold graph: the union-find merge edges.
  std::vector<std::vector<std::size_t>> adj(m);
  UnionFind uf(m);
  NeighborGrid grid(space, members, r);
  grid.for_each_open_candidate(uf, [&](std::size_t a, std::size_t b) {
    if (within(space.d(members[a], members[b]), r)) {
      uf.unite(a, b);
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  });
  if (uf.find(src) != uf.find(dst)) return {};

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> prev(m, kNone);
  std::deque<std::size_t> queue{src};
  prev[src] = src;
  while (!queue.empty()) {
    const std::size_t a = queue.front();
    queue.pop_front();
    if (a == dst) break;
    for (std::size_t b : adj[a])
      if (prev[b] == kNone) {
        prev[b] = a;
        queue.push_back(b);
      }
  }
  std::vector<std::size_t> path;
  for (std::size_t a = dst; a != src; a = prev[a]) path.push_back(members[a]);
  path.push_back(members[src]);
  std::reverse(path.begin(), path.end());
  return path;
}

// ---------------------------------------------------------------------------
// Dendrogram

std::vector<WeightedEdge> minimum_spanning_tree(const FiniteMetricSpace& space) {
  const std::size_t n = space.size();
  std::vector<WeightedEdge> edges;
  if (n < 2) return edges;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> best(n, kInf);
  std::vector<std::size_t> via(n, 0);
  std::vector<char> in_tree(n, 0);
  std::size_t current = 0;
  in_tree[0] = 1;
  edges.reserve(n - 1);
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t q = 0; q < n; ++q) {
      if (in_tree[q]) continue;
      const double d = space.d(current, q);
      // Equal-weight attachments prefer the lexicographically smaller edge.
      const auto cand = std::minmax(current, q);
      const auto held = std::minmax(via[q], q);
      if (d < best[q] || (d == best[q] && cand < held)) {
        best[q] = d;
        via[q] = current;
      }
      if (next == n || best[q] < best[next]) next = q;
    }
    in_tree[next] = 1;
    edges.push_back({best[next], std::min(via[next], next), std::max(via[next], next)});
    current = next;
  }
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return std::tie(a.weight, a.i, a.j) < std::tie(b.weight, b.i, b.j);
  });
  return edges;
}

Dendrogram dendrogram(const FiniteMetricSpace& space, const DendrogramOptions& opts) {
  if (space.empty()) throw std::domain_error("dendrogram of an empty space");
  const std::size_t n = space.size();
  Dendrogram tree;
  tree.leaves = n;
  const bool exact = n <= opts.exact_cap;
  tree.approximate = !exact;
  auto edges = minimum_spanning_tree(space);

  UnionFind uf(n);
  std::vector<std::size_t> cluster(n);  // root -> cluster id
  std::iota(cluster.begin(), cluster.end(), std::size_t{0});
  std::vector<double> diam(n, 0.0);
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};

  for (const auto& e : edges) {
    const std::size_t ra = uf.find(e.i);
    const std::size_t rb = uf.find(e.j);
    double merged = std::max(diam[ra], diam[rb]);
    if (exact) {
      for (std::size_t p : members[ra])
        for (std::size_t q : members[rb]) merged = std::max(merged, space.d(p, q));
    } else {
      merged = diam[ra] + e.weight + diam[rb];
    }
    MergeEvent ev;
    ev.scale = e.weight;
    ev.left = std::min(cluster[ra], cluster[rb]);
    ev.right = std::max(cluster[ra], cluster[rb]);
    ev.merged = n + tree.merges.size();
    ev.diameter = merged;
    ev.diameter_exact = exact;
    const std::size_t root = uf.unite(ra, rb);
    const std::size_t other = root == ra ? rb : ra;
    if (exact) {
      members[root].insert(members[root].end(), members[other].begin(), members[other].end());
      members[other].clear();
      members[other].shrink_to_fit();
    }
    cluster[root] = ev.merged;
    diam[root] = merged;
    tree.merges.push_back(ev);
  }
  return tree;
}

ComponentPartition cut(const Dendrogram& tree, double r) {
  if (!(r > 0.0)) throw std::domain_error("scale r must be positive");
  const std::size_t n = tree.leaves;
  UnionFind uf(n);
  std::vector<std::size_t> rep(n + tree.merges.size());
  std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(n), std::size_t{0});
  std::vector<double> diam(n, 0.0);
  for (const auto& ev : tree.merges) {
    if (!within(ev.scale, r)) break;
    const std::size_t root = uf.unite(rep[ev.left], rep[ev.right]);
    rep[ev.merged] = root;
    diam[root] = ev.diameter;
  }
  ComponentPartition part;
  part.r = r;
  part.approximate = tree.approximate;
  part.component.assign(n, 0);
  std::vector<std::size_t> slot(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = uf.find(i);
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = part.diameter.size();
      part.diameter.push_back(diam[root]);
    }
    part.component[i] = slot[root];
  }
  return part;
}

// ---------------------------------------------------------------------------
// Profiles

std::vector<ComponentPartition> components_profile(const FiniteMetricSpace& space,
                                                   const ScaleLadder& ladder,
                                                   const ComponentOptions& opts) {
  const std::size_t n = space.size();
  std::vector<std::size_t> order(ladder.scales.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ladder.scales[a] < ladder.scales[b]; });

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  UnionFind uf(n);
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  std::vector<Diameter> diam(n);
  for (std::size_t i = 0; i < n; ++i) diam[i] = {0.0, i, i, true};

  auto merge = [&](std::size_t ra, std::size_t rb) {
    Diameter best = diam[ra].value >= diam[rb].value ? diam[ra] : diam[rb];
    const std::size_t total = members[ra].size() + members[rb].size();
    if (total <= opts.exact_diameter_cap) {
      for (std::size_t p : members[ra])
        for (std::size_t q : members[rb]) {
          const double d = space.d(p, q);
          if (d > best.value) best = {d, std::min(p, q), std::max(p, q), true};
        }
      best.exact = diam[ra].exact && diam[rb].exact;
    } else {
      // Lower bound from the known extremal points of each side.
      auto probe = [&](std::size_t from, const std::vector<std::size_t>& other) {
        for (std::size_t q : other) {
          const double d = space.d(from, q);
          if (d > best.value) best = {d, std::min(from, q), std::max(from, q), false};
        }
      };
      probe(diam[ra].a, members[rb]);
      probe(diam[ra].b, members[rb]);
      probe(diam[rb].a, members[ra]);
      probe(diam[rb].b, members[ra]);
      best.exact = false;
    }
    const std::size_t root = uf.unite(ra, rb);
    const std::size_t other = root == ra ? rb : ra;
    members[root].insert(members[root].end(), members[other].begin(), members[other].end());
    members[other].clear();
    members[other].shrink_to_fit();
    diam[root] = best;
  };

  std::vector<ComponentPartition> out(ladder.scales.size());
  for (std::size_t idx : order) {
    const double r = ladder.scales[idx];
    if (!(r > 0.0)) throw std::domain_error("scale r must be positive");
    NeighborGrid grid(space, all, r);
    grid.for_each_open_candidate(uf, [&](std::size_t a, std::size_t b) {
      if (within(space.d(a, b), r)) merge(uf.find(a), uf.find(b));
    });
    ComponentPartition part;
    part.r = r;
    part.component.assign(n, 0);
    std::vector<std::size_t> slot(n, std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t root = uf.find(i);
      if (slot[root] == std::numeric_limits<std::size_t>::max()) {
        slot[root] = part.diameter.size();
        part.diameter.push_back(diam[root].value);
        part.approximate = part.approximate || !diam[root].exact;
      }
      part.component[i] = slot[root];
    }
    out[idx] = std::move(part);
  }
  return out;
}

bool refines(const ComponentPartition& fine, const ComponentPartition& coarse) {
  if (fine.component.size() != coarse.component.size()) return false;
  std::vector<std::size_t> image(fine.count(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < fine.component.size(); ++i) {
    auto& slot = image[fine.component[i]];
    if (slot == std::numeric_limits<std::size_t>::max()) slot = coarse.component[i];
    else if (slot != coarse.component[i]) return false;
  }
  return true;
}

}  // namespace lipdim
