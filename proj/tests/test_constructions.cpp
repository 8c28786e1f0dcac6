#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <set>

#include "lipdim/components.hpp"
#include "lipdim/constructions.hpp"
#include "lipdim/generators.hpp"
#include "lipdim/lightness.hpp"

using namespace lipdim;

namespace {

SpacePtr share(FiniteMetricSpace x) { return std::make_shared<const FiniteMetricSpace>(std::move(x)); }

FiniteMetricSpace line(std::vector<double> xs) { return point_cloud(std::move(xs), 1); }

FiniteMetricSpace shifted_net(std::size_t n, double shift) {
  std::vector<double> xs;
  for (std::size_t i = 0; i <= n; ++i) xs.push_back(shift + static_cast<double>(i) / n);
  return line(xs);
}

// Sub-space of z on positions, keeping ids.
SpacePtr part(const SpacePtr& z, const std::vector<std::size_t>& pos) { return share(z->subset(pos)); }

}  // namespace

TEST_CASE("projections") {
  const auto c = share(carpet(3, 3));
  const auto line_map = line_projection(c, {1.0, std::sqrt(2.0)});
  CHECK(lipschitz_constant(line_map).max_ratio <= 1.0 + 1e-9);
  const auto x = coordinate_projection(c, {0});
  CHECK(x.codomain->size() == 28);
  CHECK(lipschitz_constant(x).max_ratio == doctest::Approx(1.0));
  const auto basis = orthonormal_complement({1.0, 2.0, 2.0});
  REQUIRE(basis.size() == 2);
  for (const auto& b : basis) CHECK(b[0] + 2 * b[1] + 2 * b[2] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(basis[0][0] * basis[1][0] + basis[0][1] * basis[1][1] + basis[0][2] * basis[1][2] ==
        doctest::Approx(0.0).epsilon(1e-12));
  const auto k = share(random_cloud(200, 3, 1));
  CHECK(lipschitz_constant(direction_projection(k, {1.0, 2.0, 2.0})).max_ratio <= 1.0 + 1e-9);
}

TEST_CASE("product maps") {
  const auto a = share(interval_net(20)), b = share(interval_net(20));
  const auto ii = product_map(identity_map(a), identity_map(b));
  CHECK(ii.domain->size() == 441);
  CHECK(lipschitz_constant(ii).max_ratio == doctest::Approx(1.0));
  CHECK(lipschitz_constant(ii).min_ratio == doctest::Approx(1.0));

  const auto ci = product_map(constant_map(a), identity_map(b));
  const auto cf = constant_map(a);
  for (double r : {0.5, 0.25, 0.2}) {
    const double want = ll_constant_at_scale(cf, r).constant;
    CHECK(ll_constant_at_scale(ci, r).constant == doctest::Approx(want));
  }
}

TEST_CASE("McShane extension") {
  const auto z = interval_net(2);  // {0, 0.5, 1}
  const auto net = shifted_net(4, 0.0);
  std::vector<double> scaled;
  for (std::size_t i = 0; i < net.size(); ++i) scaled.push_back(2 * net.coords(i)[0]);
  const auto two = line(scaled);  // net of [0, 2]
  const std::size_t p0 = 0, p1 = 2, p2 = 4;
  const auto ext = mcshane_extend(two, {p0, p1}, {0.0, 1.0}, 1.0);
  CHECK(ext[p2] == doctest::Approx(2.0));
  CHECK(ext[p0] == 0.0);
  CHECK(ext[p1] == 1.0);

  std::vector<std::size_t> all(z.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto whole = mcshane_extend(z, all, {0.3, 0.1, 0.4}, 1.0);
  CHECK(whole == std::vector<double>{0.3, 0.1, 0.4});
  CHECK_THROWS_AS(mcshane_extend(z, {0, 2}, {0.0, 5.0}, 1.0), std::domain_error);

  std::mt19937_64 rng(9);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto x = random_cloud(120, 2, seed);
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < x.size(); i += 3) sub.push_back(i);
    // 1-Lipschitz data: distance to a random point.
    const std::size_t anchor = rng() % x.size();
    std::vector<double> vals;
    for (auto i : sub) vals.push_back(x.distance(i, anchor));
    const auto f = mcshane_extend(x, sub, vals, 1.0);
    for (std::size_t k = 0; k < sub.size(); ++k) CHECK(f[sub[k]] == vals[k]);
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = i + 1; j < x.size(); ++j) CHECK(std::abs(f[i] - f[j]) <= x.distance(i, j) + 1e-12);
  }
}

TEST_CASE("union maps") {
  const auto z = share(interval_net(64));
  const auto same = union_map(z, identity_map(z), identity_map(z));
  for (double r : {0.5, 0.25, 0.125}) CHECK(ll_constant_at_scale(same, r).constant <= 1.0 + 1e-9);

  // Two disjoint intervals, each mapped by its identity.
  std::vector<double> xs;
  for (std::size_t i = 0; i <= 32; ++i) xs.push_back(i / 32.0);
  for (std::size_t i = 0; i <= 32; ++i) xs.push_back(2.0 + i / 32.0);
  const auto zz = share(line(xs));
  std::vector<std::size_t> left, right;
  for (std::size_t i = 0; i < zz->size(); ++i) (i <= 32 ? left : right).push_back(i);
  const auto f = identity_map(part(zz, left)), g = identity_map(part(zz, right));
  const auto u = union_map(zz, f, g);
  const auto prof = ll_profile(u, certified_ladder(*zz, 1.0));
  for (double v : prof.constants) CHECK(v <= 9.0);
  CHECK_THROWS_AS(union_map(zz, f, f), std::domain_error);
}

TEST_CASE("Cantor coding") {
  const auto y = share(interval_net(16));
  const auto code = cantor_coding_map(y, 3);
  REQUIRE(code.nets.size() == 3);
  for (std::size_t k = 1; k < code.nets.size(); ++k) {
    const auto& coarse = code.nets[k - 1];
    const auto& fine = code.nets[k];
    CHECK(std::equal(coarse.begin(), coarse.end(), fine.begin()));
  }
  // The image contains the finest net.
  std::set<PointId> image;
  for (std::size_t i = 0; i < code.map.domain->size(); ++i)
    image.insert(code.map.codomain->id(code.map.pairing[i]));
  for (auto p : code.nets.back()) CHECK(image.count(y->id(p)) == 1);
  // Two chains of nets contribute 4 d(a, b) each.
  const auto lip = lipschitz_constant(code.map, 1u << 20);
  CHECK(lip.exact);
  CHECK(lip.max_ratio <= 8.0 + 1e-9);
  // The word source is ultrametric: s-components have diameter <= s.
  for (double s : {0.5, 0.25, 0.125})
    for (double d : r_components(*code.source, s).diameter) CHECK(d <= s);
  CHECK_THROWS_AS(cantor_coding_map(share(interval_net(4)), 0), std::domain_error);
  CHECK_THROWS_AS(cantor_coding_map(share(rescale(interval_net(4), 2.0)), 2), std::domain_error);
}

TEST_CASE("tree root maps") {
  const auto path = share(tree(TreeShape::Path, 40));
  const auto f = tree_root_map(path, 0);
  CHECK(lipschitz_constant(f).max_ratio == doctest::Approx(1.0));
  CHECK(lipschitz_constant(f).min_ratio == doctest::Approx(1.0));
  for (double r : {4.0, 2.0}) CHECK(ll_constant_at_scale(f, r).constant <= 1.0 + 1e-9);

  const auto star = share(tree(TreeShape::Star, 9));
  const auto g = tree_root_map(star, 0);
  const auto fib = g.fibers();
  std::size_t leaves = 0;
  for (const auto& fb : fib) leaves = std::max(leaves, fb.size());
  CHECK(leaves == 8);
  // Leaves sit 2 apart, so below r = 2 they are separate components.
  CHECK(ll_constant_at_scale(g, 1.5).constant <= 1.0);
}

TEST_CASE("absolute value fold") {
  std::vector<double> xs;
  for (int i = -32; i <= 32; ++i) xs.push_back(i / 32.0);
  const auto x = share(line(xs));
  const auto f = abs_fold_map(x);
  const auto ladder = certified_ladder(*x, 2.0);
  const auto ds = david_semmes_constant(f, ladder);
  CHECK(ds.exact);
  CHECK(ds.constant <= 2.0);
  const auto prof = ll_profile(f, ladder);
  CHECK(prof.max_constant() <= 16.0);
  CHECK(prof.max_constant() >= 2.0);
}

TEST_CASE("map specs") {
  MapSpec s;
  s.kind = "direction";
  s.direction = {1.0, std::sqrt(2.0)};
  const auto back = map_spec_from_json(to_json(s));
  CHECK(back.kind == "direction");
  CHECK(back.direction == s.direction);
  const auto c = share(carpet(3, 2));
  CHECK(build_map(back, c).codomain->size() == build_map(s, c).codomain->size());
  MapSpec bad;
  bad.kind = "warp";
  CHECK_THROWS_AS(build_map(bad, c), std::domain_error);
}
