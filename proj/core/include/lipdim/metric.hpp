#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lipdim {

enum class MetricKind {
  Euclidean,
  Scaled,
  Snowflake,
  Koranyi,
  UltrametricWords,
  TreePath,
  ProductSup,
  ExplicitMatrix,
};

std::string to_string(MetricKind kind);

/// Rooted tree with positive edge lengths; vertex ids are 0..n-1 and the
/// parent of the root is -1. Distances are answered with binary lifting.
class TreeData {
 public:
  TreeData(std::vector<long> parent, std::vector<double> edge_length);

  std::size_t size() const { return parent_.size(); }
  std::size_t root() const { return root_; }
  const std::vector<long>& parent() const { return parent_; }
  const std::vector<double>& edge_length() const { return edge_length_; }
  double root_distance(std::size_t v) const { return weighted_depth_[v]; }

  std::size_t lca(std::size_t a, std::size_t b) const;
  double distance(std::size_t a, std::size_t b) const;

 private:
  std::vector<long> parent_;
  std::vector<double> edge_length_;
  std::vector<std::size_t> depth_;
  std::vector<double> weighted_depth_;
  std::vector<std::vector<std::size_t>> up_;
  std::size_t root_ = 0;
};

/// Dense symmetric distance matrix addressed by a row index stored in the
/// point's coordinate slot.
struct DistanceMatrix {
  std::size_t n = 0;
  std::vector<double> values;  // row-major n*n

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

class MetricRule;
using RulePtr = std::shared_ptr<const MetricRule>;

/// A distance rule evaluated on coordinate records.
///
/// Every rule reads `width()` consecutive slots starting at `offset()` of a
/// point's coordinate record. Composite rules (Scaled, Snowflake, ProductSup)
/// delegate to children; ProductSup children occupy disjoint slot ranges.
class MetricRule {
 public:
  MetricKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }
  std::size_t width() const { return width_; }
  /// Snowflake exponent or Scaled factor.
  double parameter() const { return parameter_; }
  const RulePtr& left() const { return left_; }
  const RulePtr& right() const { return right_; }
  const std::shared_ptr<const TreeData>& tree() const { return tree_; }
  const std::shared_ptr<const DistanceMatrix>& matrix() const { return matrix_; }

  double operator()(const double* a, const double* b) const;

  /// True when every slot read by the rule is a real ambient coordinate.
  bool has_ambient_coordinates() const;

  /// Per-slot half widths of an axis-aligned box that contains the closed ball
  /// of radius `r` around any point whose coordinates lie in
  /// [lo, hi]; infinite entries leave a slot unconstrained. Empty when the
  /// rule does not admit one (trees, explicit matrices); such rules fall back
  /// to exhaustive enumeration.
  std::optional<std::vector<double>> search_box(
      double r, std::span<const double> lo, std::span<const double> hi) const;

  /// Same rule reading slots shifted by `delta`.
  RulePtr shifted(std::size_t delta) const;

  friend RulePtr euclidean(std::size_t dim, std::size_t offset);
  friend RulePtr scaled(double lambda, RulePtr base);
  friend RulePtr snowflake(double alpha, RulePtr base);
  friend RulePtr koranyi(std::size_t offset);
  friend RulePtr ultrametric_words(std::size_t depth, std::size_t offset);
  friend RulePtr tree_path(std::shared_ptr<const TreeData> tree, std::size_t offset);
  friend RulePtr product_sup(RulePtr left, RulePtr right);
  friend RulePtr explicit_matrix(std::shared_ptr<const DistanceMatrix> matrix,
                                 std::size_t offset);

 private:
  MetricRule() = default;

  MetricKind kind_ = MetricKind::Euclidean;
  std::size_t offset_ = 0;
  std::size_t width_ = 0;
  double parameter_ = 1.0;
  RulePtr left_;
  RulePtr right_;
  std::shared_ptr<const TreeData> tree_;
  std::shared_ptr<const DistanceMatrix> matrix_;
};

RulePtr euclidean(std::size_t dim, std::size_t offset = 0);
RulePtr scaled(double lambda, RulePtr base);
RulePtr snowflake(double alpha, RulePtr base);
/// Korányi distance ‖q⁻¹p‖ on (x, y, t) triples, ‖(z,t)‖ = (|z|⁴ + 16t²)^¼.
RulePtr koranyi(std::size_t offset = 0);
/// 2^{-i} where i is the first (1-based) position at which two words differ.
RulePtr ultrametric_words(std::size_t depth, std::size_t offset = 0);
RulePtr tree_path(std::shared_ptr<const TreeData> tree, std::size_t offset = 0);
/// ℓ∞ combination; the right factor is shifted past the left factor's slots.
RulePtr product_sup(RulePtr left, RulePtr right);
RulePtr explicit_matrix(std::shared_ptr<const DistanceMatrix> matrix,
                        std::size_t offset = 0);

/// Multiplies all distances by `lambda`. Snowflakes are rescaled through their
/// base (by lambda^{1/alpha}) so that snowflake and rescale commute exactly.
RulePtr rescale_rule(const RulePtr& rule, double lambda);

/// Heisenberg group law (z,t)(z',t') = (z+z', t+t' - ½ Im(z conj z')).
struct HeisenbergPoint {
  double x = 0, y = 0, t = 0;
};
HeisenbergPoint heisenberg_multiply(const HeisenbergPoint& a, const HeisenbergPoint& b);
HeisenbergPoint heisenberg_inverse(const HeisenbergPoint& a);
double koranyi_norm(const HeisenbergPoint& p);

}  // namespace lipdim
