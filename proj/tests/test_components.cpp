#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "lipdim/components.hpp"
#include "lipdim/generators.hpp"

using namespace lipdim;

namespace {

FiniteMetricSpace line(std::vector<double> xs) { return point_cloud(std::move(xs), 1); }

// Brute-force oracle: labels by flood fill over all pairs, exact diameters.
ComponentPartition brute_components(const FiniteMetricSpace& x, double r) {
  const std::size_t n = x.size();
  std::vector<std::size_t> label(n, n);
  std::size_t next = 0;
  ComponentPartition out;
  out.r = r;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != n) continue;
    std::vector<std::size_t> stack{s}, members;
    label[s] = next;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      members.push_back(a);
      for (std::size_t b = 0; b < n; ++b)
        if (label[b] == n && within(x.distance(a, b), r)) {
          label[b] = next;
          stack.push_back(b);
        }
    }
    double diam = 0.0;
    for (auto a : members)
      for (auto b : members) diam = std::max(diam, x.distance(a, b));
    out.diameter.push_back(diam);
    ++next;
  }
  out.component = label;
  return out;
}

// Same partition up to relabelling, with equal diameters.
void check_same(const ComponentPartition& got, const ComponentPartition& want) {
  REQUIRE(got.component.size() == want.component.size());
  REQUIRE(got.count() == want.count());
  std::vector<std::size_t> map(got.count(), want.count());
  for (std::size_t i = 0; i < got.component.size(); ++i) {
    auto& m = map[got.component[i]];
    if (m == want.count()) m = want.component[i];
    CHECK(m == want.component[i]);
  }
  for (std::size_t c = 0; c < got.count(); ++c)
    CHECK(got.diameter[c] == doctest::Approx(want.diameter[map[c]]).epsilon(1e-12));
}

// Kruskal over all pairs.
std::vector<double> kruskal_weights(const FiniteMetricSpace& x) {
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) edges.push_back({x.distance(i, j), i, j});
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) { return a.weight < b.weight; });
  UnionFind uf(x.size());
  std::vector<double> w;
  for (const auto& e : edges)
    if (uf.find(e.i) != uf.find(e.j)) {
      uf.unite(e.i, e.j);
      w.push_back(e.weight);
    }
  return w;
}

}  // namespace

TEST_CASE("r_components small cases") {
  const auto x = line({0, 1, 3});
  const auto p = r_components(x, 1.0);
  CHECK(p.count() == 2);
  CHECK(p.component[0] == p.component[1]);
  CHECK(p.component[0] != p.component[2]);
  CHECK(p.diameter[p.component[0]] == 1.0);
  CHECK(p.diameter[p.component[2]] == 0.0);

  const auto w = word_cantor(2, 3);
  const auto q = r_components(w, 0.25);
  CHECK(q.count() == 2);
  for (double d : q.diameter) CHECK(d == 0.25);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j)
      CHECK((q.component[i] == q.component[j]) == (w.coords(i)[0] == w.coords(j)[0]));
}

TEST_CASE("harmonic tail is one component at r = 0.01") {
  const auto h = harmonic(100);
  const auto p = r_components(h, 0.01);
  check_same(p, brute_components(h, 0.01));
  const std::size_t zero = *h.index_of(0);
  CHECK(p.diameter[p.component[zero]] == doctest::Approx(0.105).epsilon(0.05));
}

TEST_CASE("components match the brute-force oracle") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto x = random_cloud(300, 1 + seed % 3, seed);
    for (double r : {0.02, 0.05, 0.1, 0.3}) check_same(r_components(x, r), brute_components(x, r));
  }
  const auto t = tree(TreeShape::Random, 250, 3);
  for (double r : {1.0, 2.0, 3.0}) check_same(r_components(t, r), brute_components(t, r));
  const auto k = heisenberg_net(1.0, 0.25);
  for (double r : {0.3, 0.6}) check_same(r_components(k, r), brute_components(k, r));
}

TEST_CASE("dendrogram merge scales") {
  const auto x = line({0, 1, 3});
  const auto d = dendrogram(x);
  REQUIRE(d.merges.size() == 2);
  CHECK(d.merges[0].scale == 1.0);
  CHECK(d.merges[1].scale == 2.0);

  // n points on a circle of circumference n: every merge at the unit chord.
  const std::size_t n = 64;
  std::vector<double> c;
  const double rad = n / (2 * M_PI);
  for (std::size_t i = 0; i < n; ++i) {
    c.push_back(rad * std::cos(2 * M_PI * i / n));
    c.push_back(rad * std::sin(2 * M_PI * i / n));
  }
  const auto circle = point_cloud(c, 2);
  const double chord = 2 * rad * std::sin(M_PI / n);
  for (const auto& m : dendrogram(circle).merges) CHECK(m.scale == doctest::Approx(chord).epsilon(1e-12));

  const auto cloud = random_cloud(200, 2, 42);
  const auto want = kruskal_weights(cloud);
  const auto got = dendrogram(cloud);
  REQUIRE(got.merges.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(got.merges[i].scale == want[i]);
  for (double r : {0.03, 0.08, 0.2}) check_same(cut(got, r), brute_components(cloud, r));
}

TEST_CASE("components_profile") {
  const auto net = interval_net(1000);
  const auto ladder = certified_ladder(net, 1.0);
  for (const auto& p : components_profile(net, ladder)) {
    CHECK(p.count() == 1);
    CHECK(p.max_diameter() == doctest::Approx(1.0));
  }

  // Middle-thirds Cantor set: just below 3^-k the components are level-k cells.
  const auto cantor = middle_cantor(1.0 / 3.0, 7);
  ScaleLadder l;
  for (int k = 1; k <= 4; ++k) l.scales.push_back(std::pow(3.0, -k) * 0.99);
  const auto profile = components_profile(cantor, l);
  for (int k = 1; k <= 4; ++k) {
    const auto& p = profile[k - 1];
    CHECK(p.count() == (1u << k));
    check_same(p, brute_components(cantor, l.scales[k - 1]));
    CHECK(p.max_diameter() == doctest::Approx(std::pow(3.0, -k)).epsilon(1e-9));
  }

  // Two unit intervals ten apart merge when r crosses 10.
  std::vector<double> xs;
  for (int i = 0; i <= 10; ++i) xs.push_back(i * 0.1);
  for (int i = 0; i <= 10; ++i) xs.push_back(11.0 + i * 0.1);
  const auto two = line(xs);
  ScaleLadder m{{12.0, 10.5, 9.5, 1.0}, 0.5, 0.0};
  const auto pr = components_profile(two, m);
  CHECK(pr[0].count() == 1);
  CHECK(pr[1].count() == 1);
  CHECK(pr[2].count() == 2);
  CHECK(pr[3].count() == 2);
}

TEST_CASE("profile properties") {
  const std::vector<FiniteMetricSpace> spaces = {random_cloud(800, 2, 8), koch(4), carpet(3, 3),
                                                 word_cantor(3, 4), tree(TreeShape::Binary, 300, 1)};
  for (const auto& x : spaces) {
    const auto ladder = certified_ladder(x, x.diameter(), 0.5, 1.0);
    const auto profile = components_profile(x, ladder);
    // Coarse scales come first: each finer partition refines the previous one.
    for (std::size_t j = 1; j < profile.size(); ++j) CHECK(refines(profile[j], profile[j - 1]));
    for (std::size_t j = 0; j < profile.size(); ++j) check_same(profile[j], r_components(x, ladder.scales[j]));
  }
  const auto w = word_cantor(3, 5);
  for (double r : {0.5, 0.25, 0.125, 0.0625})
    for (double d : r_components(w, r).diameter) CHECK(d <= r);
}

TEST_CASE("grid neighbour enumeration finds exactly the close pairs") {
  const std::vector<FiniteMetricSpace> spaces = {random_cloud(2000, 2, 1), random_cloud(1500, 3, 2),
                                                 koch(5), heisenberg_net(1.0, 0.25)};
  for (const auto& x : spaces) {
    for (double r : {x.diameter() * 0.01, x.diameter() * 0.05}) {
      std::vector<std::size_t> all(x.size());
      std::iota(all.begin(), all.end(), 0);
      NeighborGrid grid(x, all, r);
      std::set<std::pair<std::size_t, std::size_t>> got, want;
      grid.for_each_candidate([&](std::size_t a, std::size_t b) {
        if (within(x.d(a, b), r)) got.emplace(std::min(a, b), std::max(a, b));
      });
      for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
          if (within(x.d(i, j), r)) want.emplace(i, j);
      CHECK(got == want);
    }
  }
}

TEST_CASE("r_path steps stay within r") {
  const auto x = interval_net(101);
  std::vector<std::size_t> all(x.size());
  std::iota(all.begin(), all.end(), 0);
  const auto path = r_path(x, all, 0.02, 0, 100);
  REQUIRE(path.size() >= 2);
  CHECK(path.front() == 0);
  CHECK(path.back() == 100);
  for (std::size_t i = 1; i < path.size(); ++i) CHECK(within(x.distance(path[i - 1], path[i]), 0.02));
}
