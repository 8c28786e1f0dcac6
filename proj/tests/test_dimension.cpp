#include <doctest.h>

#include <cmath>
#include <memory>
#include <set>

#include "lipdim/constructions.hpp"
#include "lipdim/dimension.hpp"
#include "lipdim/generators.hpp"

using namespace lipdim;

namespace {

SpacePtr share(FiniteMetricSpace x) { return std::make_shared<const FiniteMetricSpace>(std::move(x)); }

// Occupied grid cells of side eps, counted directly.
std::size_t occupied(const FiniteMetricSpace& x, double eps) {
  std::set<std::vector<long long>> cells;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<long long> key;
    for (double c : x.coords(i)) key.push_back(static_cast<long long>(std::floor(c / eps + 1e-9)));
    cells.insert(key);
  }
  return cells.size();
}

}  // namespace

TEST_CASE("box counting") {
  const auto net = interval_net(1024);
  const auto a = box_counting(net, certified_ladder(net, 1.0));
  CHECK(a.estimate == doctest::Approx(1.0).epsilon(0.1));
  for (std::size_t j = 0; j < a.scales.size(); ++j) CHECK(a.values[j] == occupied(net, a.scales[j]));

  const auto c = carpet(3, 5, Sampling::Centers);
  const auto b = box_counting(c, certified_ladder(c, 1.0, 1.0 / 3.0));
  CHECK(b.estimate == doctest::Approx(std::log(8.0) / std::log(3.0)).epsilon(0.06));

  // Products add dimensions.
  const auto cantor = middle_cantor(1.0 / 3.0, 6);
  const auto sq = product(cantor, cantor);
  const double one = box_counting(cantor, certified_ladder(cantor, 1.0, 1.0 / 3.0)).estimate;
  const double two = box_counting(sq, certified_ladder(sq, 1.0, 1.0 / 3.0)).estimate;
  CHECK(std::abs(two - 2 * one) <= 0.2);
  CHECK_THROWS_AS(box_counting(word_cantor(2, 4), make_ladder(0.5, 0.5, 0.1)), std::domain_error);
}

TEST_CASE("Nagata dimension zero") {
  const auto w = word_cantor(2, 8);
  const auto rw = nagata_zero_constant(w, certified_ladder(w, 0.5));
  CHECK(rw.estimate == 1.0);
  CHECK(rw.verdict == "dimension-zero");

  const auto c = middle_cantor(1.0 / 3.0, 7);
  const auto rc = nagata_zero_constant(c, certified_ladder(c, 1.0));
  CHECK(rc.estimate <= 3.0);

  const auto net = interval_net(1000);
  const auto rn = nagata_zero_constant(net, certified_ladder(net, 1.0));
  CHECK(rn.verdict != "dimension-zero");
  for (std::size_t j = 0; j < rn.scales.size(); ++j) CHECK(rn.values[j] == doctest::Approx(1.0 / rn.scales[j]));

  // Same numbers as the constant-map profile, scale by scale.
  for (const auto& x : {c, net, harmonic(2000)}) {
    const auto sx = share(x);
    const auto ladder = certified_ladder(x, 1.0);
    const auto n0 = nagata_zero_constant(x, ladder);
    const auto prof = ll_profile(constant_map(sx), ladder);
    REQUIRE(n0.values.size() == prof.constants.size());
    for (std::size_t j = 0; j < n0.values.size(); ++j) CHECK(n0.values[j] == prof.constants[j]);
  }
}

TEST_CASE("porosity") {
  const auto c = middle_cantor(1.0 / 3.0, 7);
  const auto ladder = certified_ladder(c, 1.0);
  const auto pc = porosity_constant(c, ladder);
  CHECK(pc.estimate >= 1.0 / 6.0 - 0.06);
  CHECK(pc.verdict == "porous");

  const auto net = interval_net(1000);
  const auto pn = porosity_constant(net, certified_ladder(net, 1.0));
  CHECK(pn.estimate <= 0.01);
  CHECK(pn.verdict != "porous");

  const auto h = harmonic(10000);
  const auto ph = porosity_constant(h, certified_ladder(h, 1.0));
  CHECK(ph.verdict != "porous");

  // Porous exactly when the Nagata constant stays bounded.
  for (const auto& x : {c, net, h}) {
    const auto l = certified_ladder(x, 1.0);
    const bool porous = porosity_constant(x, l).verdict == "porous";
    const bool zero = nagata_zero_constant(x, l).verdict == "dimension-zero";
    CHECK(porous == zero);
  }
  CHECK_THROWS_AS(porosity_constant(carpet(3, 2), make_ladder(0.5, 0.5, 0.2)), std::domain_error);
}

TEST_CASE("Assouad scan") {
  const auto net = interval_net(512);
  const auto a = assouad_scan(net, certified_ladder(net, 1.0));
  CHECK(a.estimate == doctest::Approx(1.0).epsilon(0.25));
  CHECK_FALSE(a.table.empty());
}

TEST_CASE("self covering") {
  const auto k = carpet(3, 3);
  std::vector<CopySpec> copies{{1.0, {0.0, 0.0}}};
  for (int level = 1; level <= 2; ++level) {
    const double s = std::pow(3.0, -level);
    for (const auto& cell : carpet_cells(3, level)) copies.push_back({s, {cell[0] * s, cell[1] * s}});
  }
  std::vector<CoveringSample> samples;
  for (std::size_t i = 0; i < k.size(); i += 37)
    for (double r : {1.0 / 3.0, 1.0 / 9.0}) samples.push_back({i, r});
  const auto rep = self_covering_check(k, copies, samples, 4, 3.0 * std::sqrt(2.0));
  CHECK(rep.passed);
  CHECK(rep.achieved_n <= 4);
  CHECK(rep.achieved_c <= 3.0 * std::sqrt(2.0) + 1e-9);

  std::vector<double> grid;
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j <= 8; ++j) {
      grid.push_back(i / 8.0);
      grid.push_back(j / 8.0);
    }
  const auto square = point_cloud(grid, 2, 1.0 / 8.0);
  std::vector<CopySpec> quads;
  for (double dx : {0.0, 0.5})
    for (double dy : {0.0, 0.5}) quads.push_back({0.5, {dx, dy}});
  std::vector<CoveringSample> centers;
  for (std::size_t i = 0; i < square.size(); i += 5) centers.push_back({i, 0.25});
  CHECK(self_covering_check(square, quads, centers, 4, 3.0 * std::sqrt(2.0)).passed);

  const auto h = harmonic(200);
  std::vector<CopySpec> dilates;
  for (int j = 1; j <= 6; ++j) dilates.push_back({std::ldexp(1.0, -j), {0.0}});
  const auto zero = *h.index_of(0);
  std::vector<CoveringSample> at_zero;
  for (int j = 2; j <= 5; ++j) at_zero.push_back({zero, std::ldexp(1.0, -j)});
  const auto bad = self_covering_check(h, dilates, at_zero, 1, 4.0);
  CHECK_FALSE(bad.passed);
  CHECK_FALSE(bad.uncovered.empty());
}

TEST_CASE("projection search") {
  const auto c = share(middle_cantor(1.0 / 3.0, 7));
  const auto rc = lipdim_upper_search(c, {}, certified_ladder(*c, 1.0));
  CHECK(rc.certified);
  CHECK(rc.k == 0);

  const auto net = share(interval_net(1000));
  const auto rn = lipdim_upper_search(net, {}, certified_ladder(*net, 1.0));
  CHECK(rn.certified);
  CHECK(rn.k == 1);
  CHECK(rn.entries.front().profile.classification == Classification::Diverging);
}
