#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lipdim/generators.hpp"
#include "lipdim/metric.hpp"
#include "lipdim/space.hpp"

using namespace lipdim;

namespace {

FiniteMetricSpace line(std::vector<double> xs) { return point_cloud(std::move(xs), 1); }

FiniteMetricSpace with(RulePtr rule, std::vector<double> coords, std::size_t width) {
  std::vector<PointId> ids(coords.size() / width);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<PointId>(i);
  return FiniteMetricSpace(ids, std::move(coords), width, std::move(rule));
}

}  // namespace

TEST_CASE("closed-form distances") {
  const auto h = with(koranyi(), {0, 0, 0, 0, 0, 1, 1, 0, 0}, 3);
  CHECK(h.distance(0, 1) == doctest::Approx(2.0));
  CHECK(h.distance(0, 2) == doctest::Approx(1.0));

  const auto s = with(snowflake(0.5, euclidean(1)), {0.0, 0.25, 4.0}, 1);
  CHECK(s.distance(0, 1) == doctest::Approx(0.5));
  CHECK(s.distance(0, 2) == doctest::Approx(2.0));

  const auto w = with(ultrametric_words(3), {1, 2, 3, 1, 3, 3, 2, 2, 3}, 3);
  CHECK(w.distance(0, 1) == 0.25);
  CHECK(w.distance(0, 2) == 0.5);
}

TEST_CASE("product sup distance is the max of the factors") {
  const auto x = random_cloud(12, 2, 3);
  const auto y = random_cloud(9, 1, 4);
  const auto p = product(x, y);
  REQUIRE(p.size() == x.size() * y.size());
  for (std::size_t a = 0; a < p.size(); a += 5)
    for (std::size_t b = 0; b < p.size(); b += 3) {
      const double want = std::max(x.distance(a / y.size(), b / y.size()), y.distance(a % y.size(), b % y.size()));
      CHECK(p.distance(a, b) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("eps_net") {
  const auto x = line({0.0, 0.4, 1.0});
  auto net = eps_net(x, 0.5);
  std::sort(net.begin(), net.end());
  CHECK(net == std::vector<std::size_t>{0, 2});
  CHECK(eps_net(x, 5.0) == std::vector<std::size_t>{0});

  // 1000-point grid: separated and covering, checked directly.
  const auto g = interval_net(1000);
  const auto n = eps_net(g, 0.1);
  CHECK(n.size() >= 9);
  CHECK(n.size() <= 12);
  for (std::size_t a = 0; a < n.size(); ++a)
    for (std::size_t b = a + 1; b < n.size(); ++b) CHECK(g.distance(n[a], n[b]) >= 0.1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double best = 1e300;
    for (auto c : n) best = std::min(best, g.distance(i, c));
    CHECK(best < 0.1);
  }
}

TEST_CASE("window and rescale") {
  const auto x = line({0, 1, 2, 3});
  CHECK(window(x, 0, 1.5).size() == 2);
  CHECK(window(x, 0, 10.0).size() == 4);

  const auto two = line({0, 1});
  CHECK(rescale(two, 1.0).distance(0, 1) == 1.0);
  CHECK(rescale(two, 3.0).distance(0, 1) == doctest::Approx(3.0));

  const auto flake = snowflake_space(two, 0.5);
  const auto big = rescale(flake, 2.0);
  CHECK(big.distance(0, 1) == doctest::Approx(2.0));
  // Rescaling a snowflake goes through its base: spacing 1 becomes 4.
  CHECK(big.rule()->kind() == MetricKind::Snowflake);
  const auto base = FiniteMetricSpace(big.ids(), big.coordinate_data(), 1, big.rule()->left());
  CHECK(base.distance(0, 1) == doctest::Approx(4.0));
}

TEST_CASE("carpet corner windows rescale to coarser generations") {
  const auto g3 = carpet(3, 3);
  for (int k = 1; k <= 2; ++k) {
    const double side = std::pow(3.0, -k);
    const auto coarse = carpet(3, 3 - k);
    // The closed ball of radius side*sqrt(2) holds the whole corner cell.
    const auto w = window(g3, 0, side * std::sqrt(2.0));
    std::vector<std::pair<long, long>> got, want;
    const double res = coarse.resolution();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto c = w.coords(i);
      if (c[0] > side + 1e-12 || c[1] > side + 1e-12) continue;
      got.emplace_back(std::lround(c[0] / side / res), std::lround(c[1] / side / res));
    }
    for (std::size_t i = 0; i < coarse.size(); ++i)
      want.emplace_back(std::lround(coarse.coords(i)[0] / res), std::lround(coarse.coords(i)[1] / res));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);
  }
}

TEST_CASE("rescale composes multiplicatively") {
  const auto x = snowflake_space(random_cloud(40, 2, 9), 0.7);
  const auto ab = rescale(rescale(x, 0.3), 5.0);
  const auto c = rescale(x, 1.5);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      CHECK(ab.distance(i, j) == doctest::Approx(c.distance(i, j)).epsilon(1e-12));
}

TEST_CASE("metric axioms hold on generated spaces") {
  std::vector<FiniteMetricSpace> spaces = {
      carpet(3, 2), gasket(3), koch(3), word_cantor(2, 5), tree(TreeShape::Random, 200, 7),
      middle_cantor(1.0 / 3.0, 5), harmonic(100), strip(3, 50), heisenberg_net(1.0, 0.25),
      snowflake_space(random_cloud(1000, 2, 11), 0.5),
      product(interval_net(20), word_cantor(2, 3))};
  for (const auto& s : spaces) {
    const auto report = check_metric_axioms(s);
    CHECK_MESSAGE(report.ok, report.message);
    CHECK(report.triples_checked > 0);
  }
}

TEST_CASE("Heisenberg left invariance and dilation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const auto rule = koranyi();
  auto dist = [&](const HeisenbergPoint& p, const HeisenbergPoint& q) {
    const double a[3] = {p.x, p.y, p.t}, b[3] = {q.x, q.y, q.t};
    return (*rule)(a, b);
  };
  for (int k = 0; k < 10000; ++k) {
    const HeisenbergPoint g{u(rng), u(rng), u(rng)}, p{u(rng), u(rng), u(rng)}, q{u(rng), u(rng), u(rng)};
    const double d = dist(p, q);
    CHECK(std::abs(dist(heisenberg_multiply(g, p), heisenberg_multiply(g, q)) - d) <= 1e-9 * std::max(1.0, d));
    const double lam = 0.25 + std::abs(u(rng));
    const HeisenbergPoint dp{lam * p.x, lam * p.y, lam * lam * p.t}, dq{lam * q.x, lam * q.y, lam * lam * q.t};
    CHECK(dist(dp, dq) == doctest::Approx(lam * d).epsilon(1e-9));
  }
}

TEST_CASE("invalid input is rejected") {
  const auto x = line({0, 1});
  CHECK_THROWS_AS(x.distance(0, 5), std::domain_error);
  CHECK_THROWS_AS(x.distance_by_id(0, 99), std::domain_error);
  CHECK_THROWS_AS(snowflake(1.5, euclidean(1)), std::domain_error);
}
