#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lipdim/space.hpp"

namespace lipdim {

/// Raised when a generator would exceed the point budget.
class BudgetError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Point budget for generators: $LIPDIM_BUDGET when set, else 10^7.
std::size_t point_budget();

enum class Sampling { Corners, Centers };
enum class TreeShape { Binary, Caterpillar, Random, Path, Star };

std::string to_string(Sampling s);
std::string to_string(TreeShape s);

/// Kept generation-`gen` cells of the p-carpet as integer lower-left corners
/// in units of p^-gen, in lexicographic order.
std::vector<std::array<std::int64_t, 2>> carpet_cells(int p, int gen);

/// Sierpinski carpet S_p: all distinct corners (or centers) of kept cells.
FiniteMetricSpace carpet(int p, int gen, Sampling sampling = Sampling::Corners);
/// Sierpinski gasket on the unit equilateral triangle, vertices of kept
/// triangles (or centroids with Sampling::Centers).
FiniteMetricSpace gasket(int gen, Sampling sampling = Sampling::Corners);
/// Polyline vertices of the von Koch curve over [0,1], in curve order.
FiniteMetricSpace koch(int gen);
FiniteMetricSpace snowflake_space(const FiniteMetricSpace& base, double alpha);
/// Grid (i·eps, j·eps, k·eps²) inside the closed Korányi ball of radius R.
/// The recorded resolution is the exact largest nearest-neighbour distance.
FiniteMetricSpace heisenberg_net(double radius, double eps);
/// All M^D words over {1..M} (lexicographic), ultrametric 2^-i.
FiniteMetricSpace word_cantor(int alphabet, int depth);
/// Finite tree with TreePath metric. Node 0 is the root; coordinates hold
/// the node index. Random trees draw parents uniformly from earlier nodes and
/// edge lengths from [0.5, 1.5]; the other shapes use unit edges.
FiniteMetricSpace tree(TreeShape shape, std::size_t n, std::uint64_t seed = 0);
inline constexpr PointId kTreeRoot = 0;

/// {i/n : 0 ≤ i ≤ n}.
FiniteMetricSpace interval_net(std::size_t n);
/// Endpoints of the 2^depth intervals left after removing middle fractions.
FiniteMetricSpace middle_cantor(double ratio, int depth);
/// {0} ∪ {1/n : 1 ≤ n ≤ N}.
FiniteMetricSpace harmonic(std::size_t n);
/// interval_net(n) × {0, 2, ..., 2K} with the sup metric.
FiniteMetricSpace strip(std::size_t sheets_k, std::size_t n);
/// Uniform points of [0,1]^dim.
FiniteMetricSpace random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed);
/// Euclidean cloud from a flat coordinate buffer.
FiniteMetricSpace point_cloud(std::vector<double> coords, std::size_t dim, double resolution = 0.0);
/// Cartesian product with the sup metric; ids are i·|Y| + j.
FiniteMetricSpace product(const FiniteMetricSpace& x, const FiniteMetricSpace& y);

/// Reproducible description of a generated space.
struct SpaceSpec {
  std::string kind;  // carpet gasket koch heisenberg words tree interval
                     // cantor harmonic strip random snowflake product
  int p = 3;
  int gen = 0;
  Sampling sampling = Sampling::Corners;
  double radius = 1.0;
  double eps = 0.0;
  int alphabet = 2;
  int depth = 0;
  TreeShape shape = TreeShape::Random;
  std::size_t n = 0;
  std::size_t dim = 2;
  std::size_t sheets = 5;
  double ratio = 1.0 / 3.0;
  double alpha = 1.0;
  std::vector<SpaceSpec> factors;  // snowflake: base; product: two factors
  std::uint64_t seed = 0;
  /// Used to pick a size parameter left at 0 (gen, depth, n, eps).
  double resolution = 0.0;
};

FiniteMetricSpace generate(const SpaceSpec& spec);
SpaceSpec space_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SpaceSpec& spec);

}  // namespace lipdim
