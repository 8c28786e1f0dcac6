#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <memory>

#include "lipdim/constructions.hpp"
#include "lipdim/generators.hpp"
#include "lipdim/io.hpp"

using namespace lipdim;
namespace fs = std::filesystem;

namespace {

SpacePtr share(FiniteMetricSpace x) { return std::make_shared<const FiniteMetricSpace>(std::move(x)); }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lipdim_io_test";
  fs::create_directories(dir);
  return dir / name;
}

void check_same_space(const FiniteMetricSpace& a, const FiniteMetricSpace& b) {
  REQUIRE(a.size() == b.size());
  CHECK(a.ids() == b.ids());
  CHECK(a.rule()->kind() == b.rule()->kind());
  CHECK(a.resolution() == b.resolution());
  for (std::size_t i = 0; i < a.size(); i += 7)
    for (std::size_t j = 0; j < a.size(); j += 5) CHECK(a.distance(i, j) == b.distance(i, j));
}

}  // namespace

TEST_CASE("doubles round trip through text") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 12345.678901234567})
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("spaces round trip through CSV and sidecar") {
  const std::vector<FiniteMetricSpace> spaces = {
      carpet(3, 2), word_cantor(3, 3), tree(TreeShape::Random, 60, 4), heisenberg_net(1.0, 0.5),
      snowflake_space(koch(3), 0.5), rescale(product(interval_net(5), middle_cantor(1.0 / 3.0, 2)), 2.0)};
  int k = 0;
  for (const auto& s : spaces) {
    const auto csv = scratch("space" + std::to_string(k++) + ".csv");
    write_space(s, csv);
    CHECK(fs::exists(sidecar_path(csv)));
    check_same_space(s, read_space(csv));
  }
}

TEST_CASE("rules round trip through JSON") {
  const RulePtr rule = product_sup(snowflake(0.5, euclidean(2)), scaled(3.0, ultrametric_words(4)));
  const auto back = rule_from_json(rule_to_json(*rule));
  CHECK(rule_to_json(*back) == rule_to_json(*rule));
}

TEST_CASE("pairings round trip") {
  const auto x = share(carpet(3, 2));
  const auto f = line_projection(x, {1.0, 2.0});
  const auto csv = scratch("pairing.csv");
  write_pairing(f, csv);
  const auto g = read_pairing(x, csv);
  REQUIRE(g.pairing.size() == f.pairing.size());
  for (std::size_t i = 0; i < x->size(); ++i)
    CHECK(f.codomain->coords(f.pairing[i])[0] == g.codomain->coords(g.pairing[i])[0]);
}

TEST_CASE("malformed input is an I/O error") {
  CHECK_THROWS_AS(read_space(scratch("absent.csv")), IoError);
  CHECK_THROWS_AS(read_json(scratch("absent.json")), IoError);
  const auto x = share(interval_net(3));
  const auto csv = scratch("short.csv");
  std::ofstream(csv) << "id,y\n0,0\n1,1\n";
  CHECK_THROWS_AS(read_pairing(x, csv), IoError);
  std::ofstream(csv) << "key,y\n0,0\n";
  CHECK_THROWS_AS(read_pairing(x, csv), IoError);
}

TEST_CASE("reports serialise") {
  const auto x = share(interval_net(64));
  const auto f = constant_map(x);
  const auto p = ll_profile(f, certified_ladder(*x, 1.0));
  const auto j = to_json(p, *f.codomain);
  CHECK(j.at("C").size() == p.constants.size());
  CHECK(j.at("classification") == "diverging");
  const auto csv = profile_series_csv(p);
  CHECK(csv.rfind("scale,C", 0) == 0);
}
