#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "lipdim/components.hpp"
#include "lipdim/constructions.hpp"
#include "lipdim/generators.hpp"
#include "lipdim/lightness.hpp"

using namespace lipdim;

namespace {

SpacePtr share(FiniteMetricSpace x) { return std::make_shared<const FiniteMetricSpace>(std::move(x)); }

FiniteMetricSpace integers(int lo, int hi) {
  std::vector<double> xs;
  for (int i = lo; i <= hi; ++i) xs.push_back(i);
  return point_cloud(xs, 1);
}

// Largest r-component diameter of f^-1(W), maximised over every subset W of
// the codomain with diam(W) <= r.
double all_subsets_constant(const SampledMap& f, double r) {
  const auto& y = *f.codomain;
  const auto fib = f.fibers();
  const std::size_t m = y.size();
  double best = 0.0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    std::vector<std::size_t> w;
    for (std::size_t b = 0; b < m; ++b)
      if (mask >> b & 1) w.push_back(b);
    bool small = true;
    for (auto a : w)
      for (auto b : w) small = small && within(y.distance(a, b), r);
    if (!small) continue;
    std::vector<std::size_t> pre;
    for (auto b : w) pre.insert(pre.end(), fib[b].begin(), fib[b].end());
    std::sort(pre.begin(), pre.end());
    best = std::max(best, components_of(*f.domain, pre, r).max_diameter());
  }
  return best / r;
}

}  // namespace

TEST_CASE("Lipschitz constants") {
  const auto net = share(interval_net(101));
  CHECK(lipschitz_constant(identity_map(net)).max_ratio == doctest::Approx(1.0));
  CHECK(lipschitz_constant(constant_map(net)).max_ratio == 0.0);

  // f(n, t) = 2n + t on ([-5,5] ∩ Z) x net[0,1] with the sup metric.
  const auto x = share(product(integers(-5, 5), interval_net(21)));
  std::vector<double> img;
  for (std::size_t i = 0; i < x->size(); ++i) img.push_back(2 * x->coords(i)[0] + x->coords(i)[1]);
  const auto est = lipschitz_constant(map_from_images("2n+t", x, img, 1));
  CHECK(est.exact);
  CHECK(est.max_ratio == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(est.min_ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("constants at one scale") {
  const auto net = share(interval_net(1000));
  for (double r : {0.5, 0.1, 0.02}) {
    const auto id = ll_constant_at_scale(identity_map(net), r);
    CHECK(id.constant >= 0.5 - 1e-9);
    CHECK(id.constant <= 1.0 + 1e-9);
    CHECK(ll_constant_at_scale(constant_map(net), r).constant == doctest::Approx(1.0 / r));
  }

  // x-projection of net[0,1] x {0,2,4}: each Diam window passes at its own
  // diameter, but W = Y with r = 2 joins all sheets into one 2-component.
  const auto s = share(strip(2, 64));
  const auto proj = coordinate_projection(s, {0});
  LightnessOptions diam;
  diam.windows = WindowMode::Diam;
  CHECK(ll_constant_at_scale(proj, 2.0, diam).constant <= 1.0 + 1e-9);
  std::vector<std::size_t> all(s->size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  CHECK(components_of(*s, all, 2.0).max_diameter() >= 4.0);
  CHECK(ll_constant_at_scale(proj, 2.0).constant >= 2.0);
}

TEST_CASE("profiles") {
  const auto c = share(carpet(3, 4));
  const auto id = ll_profile(identity_map(c), certified_ladder(*c, 1.0));
  CHECK(id.classification == Classification::Bounded);
  for (double v : id.constants) CHECK(v <= 2.0);

  const auto h = share(harmonic(10000));
  const auto tail = ll_profile(constant_map(h), certified_ladder(*h, 1.0));
  CHECK(tail.classification == Classification::Diverging);
  CHECK(tail.slope == doctest::Approx(0.5).epsilon(0.2));
  CHECK_THROWS_AS(ll_profile(constant_map(h), make_ladder(1.0, 0.5, 1e-5)), std::domain_error);
}

TEST_CASE("witnesses reproduce their diameters") {
  const auto k = share(koch(4));
  for (auto mode : {WindowMode::Ball, WindowMode::Grid, WindowMode::Diam}) {
    LightnessOptions o;
    o.windows = mode;
    const auto f = coordinate_projection(k, {1});
    for (double r : {0.2, 0.05}) {
      const auto res = ll_constant_at_scale(f, r, o);
      CHECK(evaluate_witness(f, res.witness) == res.witness.diameter);
      for (std::size_t i = 1; i < res.witness.path.size(); ++i)
        CHECK(within(k->distance_by_id(res.witness.path[i - 1], res.witness.path[i]), res.witness.path_scale));
    }
  }
}

TEST_CASE("rescaling both sides leaves C invariant") {
  const auto k = share(koch(4));
  const auto f = coordinate_projection(k, {0});
  for (double lam : {0.25, 4.0}) {
    const auto g = make_map("scaled", share(rescale(*f.domain, lam)), share(rescale(*f.codomain, lam)), f.pairing);
    for (double r : {0.25, 0.0625})
      CHECK(ll_constant_at_scale(g, lam * r).constant ==
            doctest::Approx(ll_constant_at_scale(f, r).constant).epsilon(1e-12));
  }
}

TEST_CASE("ball windows sit between the all-subsets oracle at r and 2r") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto x = share(random_cloud(36, 2, seed));
    std::vector<double> img;
    for (std::size_t i = 0; i < x->size(); ++i) img.push_back(std::round(x->coords(i)[0] * 11) / 11);
    const auto f = map_from_images("rounded x", x, img, 1);
    REQUIRE(f.codomain->size() <= 12);
    for (double r : {0.1, 0.2, 0.35}) {
      const double oracle = all_subsets_constant(f, r);
      CHECK(ll_constant_at_scale(f, r).constant <= oracle + 1e-12);
      CHECK(oracle * r <= ll_constant_at_scale(f, 2 * r).constant * 2 * r + 1e-12);
    }
  }
}

TEST_CASE("product profile is controlled by the factors") {
  const auto a = share(koch(3));
  const auto b = share(middle_cantor(1.0 / 3.0, 4));
  const auto f = coordinate_projection(a, {0});
  const auto g = identity_map(b);
  const auto fg = product_map(f, g);
  for (double r : {0.3, 0.15, 0.08}) {
    const double cf = ll_constant_at_scale(f, r).constant, cg = ll_constant_at_scale(g, r).constant;
    CHECK(ll_constant_at_scale(fg, r).constant <= 1.1 * std::max(cf, cg));
  }
}

TEST_CASE("classification rule") {
  LightnessOptions o;
  const std::vector<double> s{1, 0.5, 0.25, 0.125, 0.0625};
  CHECK(classify(s, {1, 1, 1, 1, 1}, o) == Classification::Bounded);
  CHECK(classify(s, {1, 2, 4, 8, 16}, o) == Classification::Diverging);
  CHECK(classify(s, {1, 2, 4, 2, 16}, o) == Classification::Inconclusive);
  CHECK(classify(s, {1, 1.1, 1.2, 1.3, 1.4}, o) == Classification::Inconclusive);
  CHECK(classify({1}, {5}, o) == Classification::Inconclusive);
  CHECK(loglog_slope(s, {1, 2, 4, 8, 16}) == doctest::Approx(1.0));
}

TEST_CASE("maps are validated") {
  const auto x = share(interval_net(4));
  CHECK_THROWS_AS(make_map("bad", x, x, {0, 1, 2}), std::domain_error);
  CHECK_THROWS_AS(make_map("bad", x, x, {0, 1, 2, 9}), std::domain_error);
  CHECK(parse_window_mode("ball+grid") == WindowMode::BallAndGrid);
  CHECK_THROWS(parse_window_mode("disc"));
}
