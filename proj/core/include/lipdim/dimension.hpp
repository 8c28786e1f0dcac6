#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lipdim/lightness.hpp"
#include "lipdim/space.hpp"

namespace lipdim {

struct DimensionReport {
  std::string estimator;
  std::vector<double> scales;              // certified scales used
  std::vector<double> values;              // raw per-scale series
  std::vector<std::vector<double>> table;  // extra raw rows (estimator specific)
  double estimate = 0.0;
  std::string verdict;
  std::vector<std::string> notes;
  bool exact = true;
};

/// Grid-cell occupancy N(ε) at each ladder scale and the least-squares slope
/// of log N against log(1/ε) over the scales with N ≥ min_count (a handful
/// of boxes says nothing about dimension). Needs ambient coordinates.
DimensionReport box_counting(const FiniteMetricSpace& space, const ScaleLadder& ladder,
                             double kappa = 4.0, std::size_t min_count = 8);

/// Two-scale cover counts: for window radius d and cover scale ρ < d, the
/// largest ρ-net size of a closed d-ball. Rows of `table` are (d, ρ, count,
/// slope); the estimate is the supremal slope over pairs with d/ρ ≥ min_ratio.
DimensionReport assouad_scan(const FiniteMetricSpace& space, const ScaleLadder& ladder,
                             double kappa = 4.0, double min_ratio = 4.0);

/// c(s) = max s-component diameter / s per ladder scale; verdict
/// `dimension-zero` when the series classifies as bounded.
DimensionReport nagata_zero_constant(const FiniteMetricSpace& space, const ScaleLadder& ladder,
                                     const LightnessOptions& opts = {});

/// Porosity of a subset of the line: per scale, the infimum over x of the
/// longest hole of (x−r, x+r) minus the δ-thickened set, divided by 2r.
/// δ defaults to the space resolution. Verdict `porous` when the infimum over
/// all scales is at least `threshold`.
DimensionReport porosity_constant(const FiniteMetricSpace& space, const ScaleLadder& ladder,
                                  double threshold = 0.05, double delta = -1.0,
                                  double kappa = 4.0);

/// A rescaled translate s·K + v.
struct CopySpec {
  double scale = 1.0;
  std::vector<double> shift;
};

struct CoveringSample {
  std::size_t center = 0;  // position in K
  double radius = 0.0;
};

struct SelfCoveringReport {
  bool passed = true;
  std::size_t samples = 0;
  std::size_t achieved_n = 0;  // max copies used over samples
  double achieved_c = 0.0;     // max of diam(copy) / r over samples
  std::vector<std::size_t> failing_samples;
  std::vector<PointId> uncovered;  // uncovered points of the first failing sample
};

/// For each sample, tries copy scales from the smallest upward and accepts the
/// first whose copies meeting B̄(x,r) number at most n_max, have diameter at
/// most c_max·r and cover B̄(x,r) ∩ K up to the resolution of K.
SelfCoveringReport self_covering_check(const FiniteMetricSpace& k, const std::vector<CopySpec>& copies,
                                       const std::vector<CoveringSample>& samples,
                                       std::size_t n_max, double c_max);

struct UpperSearchEntry {
  std::size_t k = 0;
  std::string map;
  LightnessProfile profile;
};

struct UpperSearchReport {
  bool certified = false;
  std::size_t k = 0;  // smallest k with a bounded profile when certified
  std::string verdict;
  std::vector<UpperSearchEntry> entries;
};

/// Profiles of projections to R^k for k = 0..n: coordinate subspaces plus,
/// for each direction v, the line through v (k=1), its complement (k=n−1) and
/// the rotated frame (k=n). With stop_early the search ends at the first k
/// that has a bounded profile.
UpperSearchReport lipdim_upper_search(SpacePtr space, const std::vector<std::vector<double>>& directions,
                                      const ScaleLadder& ladder, const LightnessOptions& opts = {},
                                      bool stop_early = true);

}  // namespace lipdim
