#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lipdim/metric.hpp"

namespace lipdim {

using PointId = std::int64_t;

/// Relative tolerance for distance-threshold comparisons (d ≤ r·(1+kDistanceTol)).
inline constexpr double kDistanceTol = 1e-9;

inline bool within(double d, double r) { return d <= r * (1.0 + kDistanceTol); }

/// Immutable finite metric space: point ids, per-point coordinate records and
/// a distance rule. Copies share storage.
///
/// Points are addressed by position (0..size()-1); `id(i)` is the stable
/// identifier that windows and exports preserve.
class FiniteMetricSpace {
 public:
  /// Default cap on cached pairwise matrices (triangular storage).
  static constexpr std::size_t kDefaultCacheCap = 4096;

  FiniteMetricSpace() = default;
  FiniteMetricSpace(std::vector<PointId> ids, std::vector<double> coords, std::size_t record_width,
                    RulePtr rule, double resolution = 0.0);

  std::size_t size() const { return ids_ ? ids_->size() : 0; }
  bool empty() const { return size() == 0; }
  std::size_t record_width() const { return width_; }
  const RulePtr& rule() const { return rule_; }
  PointId id(std::size_t i) const { return (*ids_)[i]; }
  const std::vector<PointId>& ids() const { return *ids_; }
  std::span<const double> coords(std::size_t i) const {
    return {coords_->data() + i * width_, width_};
  }
  const std::vector<double>& coordinate_data() const { return *coords_; }
  std::optional<std::size_t> index_of(PointId id) const;

  bool has_ambient_coordinates() const { return rule_ && rule_->has_ambient_coordinates(); }

  /// Checked distance between positions; throws std::domain_error on bad index.
  double distance(std::size_t i, std::size_t j) const;
  /// Distance by point id; throws std::domain_error on unknown ids.
  double distance_by_id(PointId a, PointId b) const;

  /// Unchecked hot-path distance. Always evaluated with the smaller position
  /// first so that d(i,j) and d(j,i) agree bit for bit.
  double d(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    if (cache_ && cache_->ready.load(std::memory_order_acquire)) return cache_->values[tri_index(i, j)];
    return (*rule_)(coords_->data() + i * width_, coords_->data() + j * width_);
  }

  /// Sampling resolution: scales below it are not meaningful for this sample.
  /// Generators set it; otherwise it is the largest nearest-neighbour distance.
  double resolution() const;
  double diameter() const;

  /// Fill the pairwise cache when size() ≤ cap. Idempotent and thread safe.
  bool precompute_distances(std::size_t cap = kDefaultCacheCap) const;

  /// Sub-space on the given positions (ids and rule preserved, order as given).
  FiniteMetricSpace subset(std::span<const std::size_t> positions) const;
  FiniteMetricSpace with_rule(RulePtr rule, double resolution) const;

  /// Per-slot coordinate bounds over the given positions (all when empty).
  void bounds(std::span<const std::size_t> positions, std::vector<double>& lo,
              std::vector<double>& hi) const;

 private:
  struct Cache {
    std::once_flag once;
    std::atomic<bool> ready{false};
    std::vector<double> values;
  };
  static std::size_t tri_index(std::size_t i, std::size_t j) { return j * (j - 1) / 2 + i; }

  std::shared_ptr<const std::vector<PointId>> ids_;
  std::shared_ptr<const std::vector<double>> coords_;
  std::size_t width_ = 0;
  RulePtr rule_;
  double resolution_ = 0.0;
  std::shared_ptr<Cache> cache_;
  std::shared_ptr<std::once_flag> resolution_once_;
  std::shared_ptr<double> computed_resolution_;
};

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

/// Strictly decreasing list of scales r_{j+1} = ratio · r_j, all ≥ floor.
struct ScaleLadder {
  std::vector<double> scales;
  double ratio = 0.5;
  double floor = 0.0;
};

/// Ladder from r_max downwards by `ratio` while scales stay ≥ floor.
ScaleLadder make_ladder(double r_max, double ratio, double floor);
/// Ladder certified for `space`: floor = kappa · resolution.
ScaleLadder certified_ladder(const FiniteMetricSpace& space, double r_max, double ratio = 0.5,
                             double kappa = 4.0);
/// Throws std::domain_error naming kappa when a scale sits below kappa·resolution.
void require_certified(const ScaleLadder& ladder, const FiniteMetricSpace& space, double kappa);

/// Greedy farthest-point ε-net. Starts from `seed` (or the lowest id when
/// empty) and adds the farthest point while its distance to the net is ≥ eps.
/// Ties go to the lowest id. Returned positions keep insertion order.
std::vector<std::size_t> eps_net(const FiniteMetricSpace& space, double eps,
                                 std::span<const std::size_t> seed = {});

/// Closed ball B̄(center, radius) with ids preserved.
FiniteMetricSpace window(const FiniteMetricSpace& space, std::size_t center, double radius);
std::vector<std::size_t> ball_members(const FiniteMetricSpace& space, std::size_t center,
                                      double radius);

FiniteMetricSpace rescale(const FiniteMetricSpace& space, double lambda);

struct MetricAxiomReport {
  bool ok = true;
  std::size_t triples_checked = 0;
  double worst_violation = 0.0;  // max of d(i,j) - d(i,k) - d(k,j)
  std::string message;
};
/// Exhaustive for size ≤ 300, otherwise `samples` random triples from `seed`.
MetricAxiomReport check_metric_axioms(const FiniteMetricSpace& space, std::size_t samples = 100000,
                                      std::uint64_t seed = 1);

}  // namespace lipdim
