#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lipdim/lightness.hpp"
#include "lipdim/space.hpp"

namespace lipdim {

/// Map whose codomain is the set of distinct image vectors in R^k (Euclidean).
/// `images` holds k values per domain point.
SampledMap map_from_images(std::string name, SpacePtr domain, const std::vector<double>& images,
                           std::size_t k);

SampledMap identity_map(SpacePtr x);
/// Map to the one-point space R^0.
SampledMap constant_map(SpacePtr x);
/// x ↦ A·x on the coordinate record (rows of A have record_width entries).
SampledMap linear_map(SpacePtr x, const std::vector<std::vector<double>>& rows, std::string name);
/// x ↦ (x[s] for s in slots).
SampledMap coordinate_projection(SpacePtr x, const std::vector<std::size_t>& slots);
/// Orthogonal projection onto v⊥, written in an orthonormal basis of v⊥.
SampledMap direction_projection(SpacePtr x, const std::vector<double>& v);
/// x ↦ <x, v/|v|>.
SampledMap line_projection(SpacePtr x, const std::vector<double>& v);

/// Orthonormal basis of the complement of v (Gram–Schmidt on the standard
/// basis, most independent vectors first).
std::vector<std::vector<double>> orthonormal_complement(const std::vector<double>& v);

/// F = (f, g) on X × Y with the sup metric on both sides.
SampledMap product_map(const SampledMap& f, const SampledMap& g);

/// f̃(z) = min_a f(a) + L·d(a, z). Throws std::domain_error when f is not
/// L-Lipschitz on `subset` (positions in `space`).
std::vector<double> mcshane_extend(const FiniteMetricSpace& space,
                                   const std::vector<std::size_t>& subset,
                                   const std::vector<double>& values, double lipschitz);

/// F(z) = (f̃(z), g̃(z)) on Z where f, g are maps from subspaces of Z (matched
/// by id) to Euclidean codomains, each coordinate extended with its own
/// measured Lipschitz constant. Throws when the two domains do not cover Z.
SampledMap union_map(SpacePtr z, const SampledMap& f, const SampledMap& g);

struct CantorCoding {
  SpacePtr source;                             // word space over {1..M}^D
  SampledMap map;                              // source -> Y
  std::size_t alphabet = 0;                    // M
  std::vector<std::vector<std::size_t>> nets;  // N_1 .. N_D (positions in Y)
};

/// Coding of a diameter-1 space Y by words: nested greedy 2^-k nets and
/// nearest-first letter assignments. Throws when diam(Y) is not 1 or the
/// alphabet would exceed `alphabet_cap`.
CantorCoding cantor_coding_map(SpacePtr y, int depth, std::size_t alphabet_cap = 64);

/// x ↦ d(root, x).
SampledMap tree_root_map(SpacePtr tree, PointId root = 0);
/// x ↦ |x| on a subset of the line.
SampledMap abs_fold_map(SpacePtr x);

struct DavidSemmesScan {
  double constant = 0.0;  // smallest C with f^-1(B(y,r)) covered by C balls of radius C·r
  double scale = 0.0;     // worst window
  PointId center = 0;     // codomain id of the worst window
  bool exact = true;      // false when covers come from a greedy bound
};

/// Scans f^-1(B(y, r)) for every image point y and every ladder scale.
/// Covers are exact for one-dimensional domains and greedy otherwise.
DavidSemmesScan david_semmes_constant(const SampledMap& map, const ScaleLadder& ladder);

/// Reproducible map description, resolved against a domain space.
struct MapSpec {
  std::string kind;  // identity constant coordinates direction line frame linear
                     // tree_root abs_fold cantor_coding
  std::vector<std::size_t> slots;
  std::vector<double> direction;
  std::vector<std::vector<double>> rows;
  PointId root = 0;
  int depth = 5;
};

SampledMap build_map(const MapSpec& spec, SpacePtr domain);
MapSpec map_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MapSpec& spec);

}  // namespace lipdim
