#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <map>
#include <set>
#include <random>

#include "lipdim/dimension.hpp"
#include "lipdim/generators.hpp"

using namespace lipdim;

TEST_CASE("carpet and gasket cell counts") {
  CHECK(carpet(3, 1, Sampling::Centers).size() == 8);
  CHECK(carpet_cells(3, 2).size() == 64);
  CHECK(carpet_cells(5, 2).size() == 576);
  for (int g = 0; g <= 4; ++g) CHECK(carpet_cells(3, g).size() == static_cast<std::size_t>(std::pow(8, g)));
  CHECK(carpet(3, 4, Sampling::Centers).size() == 4096);
  CHECK(gasket(1, Sampling::Centers).size() == 3);
  CHECK(gasket(4, Sampling::Centers).size() == 81);
  CHECK_THROWS_AS(carpet(4, 2), std::domain_error);
  CHECK_THROWS_AS(carpet(1, 2), std::domain_error);
}

TEST_CASE("carpet corners include the boundary segments") {
  const auto c = carpet(3, 2);
  // The left edge x = 0 is sampled at every lattice height.
  std::size_t left = 0;
  for (std::size_t i = 0; i < c.size(); ++i) left += c.coords(i)[0] == 0.0;
  CHECK(left == 10);
}

TEST_CASE("gasket has no vertical segments above resolution") {
  const auto g = gasket(4);
  std::map<long long, std::vector<double>> columns;
  for (std::size_t i = 0; i < g.size(); ++i)
    columns[std::llround(g.coords(i)[0] * 1e9)].push_back(g.coords(i)[1]);
  double min_gap = 1e300;
  for (auto& [x, ys] : columns) {
    std::sort(ys.begin(), ys.end());
    for (std::size_t k = 1; k < ys.size(); ++k) min_gap = std::min(min_gap, ys[k] - ys[k - 1]);
  }
  CHECK(min_gap > g.resolution());
}

TEST_CASE("koch curve") {
  const auto k0 = koch(0);
  REQUIRE(k0.size() == 2);
  CHECK(k0.distance(0, 1) == doctest::Approx(1.0));
  const auto k1 = koch(1);
  REQUIRE(k1.size() == 5);
  double apex = 0.0;
  for (std::size_t i = 0; i < k1.size(); ++i) apex = std::max(apex, k1.coords(i)[1]);
  CHECK(apex == doctest::Approx(std::sqrt(3.0) / 6.0));
  const auto k5 = koch(5);
  CHECK(k5.size() == 1025);
  const auto box = box_counting(k5, certified_ladder(k5, 1.0));
  CHECK(box.estimate == doctest::Approx(std::log(4.0) / std::log(3.0)).epsilon(0.08));
}

TEST_CASE("snowflake spaces") {
  const auto base = point_cloud({0.0, 1.0, 4.0}, 1);
  CHECK(snowflake_space(base, 1.0).distance(0, 2) == doctest::Approx(4.0));
  CHECK(snowflake_space(base, 0.5).distance(0, 2) == doctest::Approx(2.0));
  const auto flake = snowflake_space(random_cloud(1000, 2, 3), 0.6);
  const auto report = check_metric_axioms(flake, 100000, 7);
  CHECK(report.triples_checked == 100000);
  CHECK(report.ok);
}

TEST_CASE("Heisenberg net") {
  const auto h = heisenberg_net(1.0, 0.25);
  CHECK(h.rule()->kind() == MetricKind::Koranyi);
  CHECK(koranyi_norm({1, 0, 0}) == doctest::Approx(1.0));
  CHECK(koranyi_norm({0, 0, 1}) == doctest::Approx(2.0));
  // Every generated point lies in the Korányi ball of radius 1.
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto c = h.coords(i);
    CHECK(koranyi_norm({c[0], c[1], c[2]}) <= 1.0 + 1e-9);
  }
  CHECK_THROWS_AS(heisenberg_net(1.0, 0.0), std::domain_error);
}

TEST_CASE("word spaces") {
  const auto w = word_cantor(2, 3);
  REQUIRE(w.size() == 8);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      const double d = w.distance(i, j);
      CHECK((d == 0.5 || d == 0.25 || d == 0.125));
      CHECK((d == 0.5) == (w.coords(i)[0] != w.coords(j)[0]));
    }
  CHECK(w.diameter() == 0.5);
}

TEST_CASE("trees") {
  const auto path = tree(TreeShape::Path, 4);
  CHECK(path.diameter() == doctest::Approx(3.0));
  const auto star = tree(TreeShape::Star, 7);
  for (std::size_t i = 1; i < star.size(); ++i)
    for (std::size_t j = i + 1; j < star.size(); ++j) CHECK(star.distance(i, j) == doctest::Approx(2.0));

  const auto t = tree(TreeShape::Random, 500, 11);
  CHECK(t.size() == 500);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> pick(0, t.size() - 1);
  for (int k = 0; k < 100000; ++k) {
    const std::size_t a = pick(rng), b = pick(rng), c = pick(rng), d = pick(rng);
    const double lhs = t.distance(a, b) + t.distance(c, d);
    const double rhs = std::max(t.distance(a, c) + t.distance(b, d), t.distance(a, d) + t.distance(b, c));
    if (lhs > rhs + 1e-9) FAIL("four-point condition fails");
  }
  // Same seed, same tree.
  const auto again = tree(TreeShape::Random, 500, 11);
  for (std::size_t i = 0; i < 50; ++i) CHECK(again.distance(0, i) == t.distance(0, i));
}

TEST_CASE("subsets of the line") {
  CHECK(middle_cantor(1.0 / 3.0, 6).size() == 128);
  const auto h = harmonic(50);
  CHECK(h.size() == 51);
  double lo = 1.0;
  for (std::size_t i = 0; i < h.size(); ++i) lo = std::min(lo, h.coords(i)[0]);
  CHECK(lo == 0.0);
  const auto s = strip(3, 10);
  CHECK(s.size() == 11 * 4);
  std::set<double> sheets;
  for (std::size_t i = 0; i < s.size(); ++i) sheets.insert(s.coords(i)[1]);
  CHECK(sheets == std::set<double>{0, 2, 4, 6});
}

TEST_CASE("products") {
  const auto two = point_cloud({0.0, 1.0}, 1);
  const auto sq = product(two, two);
  REQUIRE(sq.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) CHECK(sq.distance(i, j) == 1.0);
  const auto x = interval_net(10), y = middle_cantor(1.0 / 3.0, 3);
  const auto p = product(rescale(x, 3.0), y);
  CHECK(p.size() == x.size() * y.size());
  CHECK(p.diameter() == doctest::Approx(3.0));
}

TEST_CASE("specs round trip through JSON and derive sizes from resolution") {
  SpaceSpec s;
  s.kind = "carpet";
  s.resolution = 0.01;
  const auto c = generate(s);
  CHECK(c.resolution() <= 0.01);
  const auto back = space_spec_from_json(to_json(s));
  CHECK(to_json(back) == to_json(s));
  CHECK(generate(back).size() == c.size());
  CHECK_THROWS(space_spec_from_json(nlohmann::json{{"p", 3}}));
}

TEST_CASE("point budget") {
  CHECK_THROWS_AS(carpet(3, 12), BudgetError);
  CHECK_THROWS_AS(word_cantor(10, 12), BudgetError);
}
