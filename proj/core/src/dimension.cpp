#include "lipdim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lipdim/components.hpp"
#include "lipdim/constructions.hpp"

namespace lipdim {

namespace {

void require_ambient_slots(const FiniteMetricSpace& space, const char* what) {
  if (!space.has_ambient_coordinates())
    throw std::domain_error(std::string(what) + " needs ambient coordinates");
}

}  // namespace

DimensionReport box_counting(const FiniteMetricSpace& space, const ScaleLadder& ladder, double kappa,
                             std::size_t min_count) {
  require_ambient_slots(space, "box counting");
  require_certified(ladder, space, kappa);
  const std::size_t off = space.rule()->offset(), w = space.rule()->width();
  std::vector<double> lo, hi;
  space.bounds({}, lo, hi);
  DimensionReport rep;
  rep.estimator = "box_counting";
  rep.scales = ladder.scales;
  std::vector<std::int64_t> keys(space.size() * w);
  for (double eps : ladder.scales) {
    for (std::size_t i = 0; i < space.size(); ++i) {
      auto c = space.coords(i);
      // The small offset keeps lattice-aligned samples on one side of cell walls.
      for (std::size_t a = 0; a < w; ++a)
        keys[i * w + a] = static_cast<std::int64_t>(std::floor((c[off + a] - lo[off + a]) / eps + 1e-7));
    }
    std::vector<std::size_t> order(space.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(keys.begin() + a * w, keys.begin() + (a + 1) * w,
                                          keys.begin() + b * w, keys.begin() + (b + 1) * w);
    };
    std::sort(order.begin(), order.end(), less);
    std::size_t count = order.empty() ? 0 : 1;
    for (std::size_t i = 1; i < order.size(); ++i)
      if (less(order[i - 1], order[i])) ++count;
    rep.values.push_back(static_cast<double>(count));
  }
  std::vector<double> fit_scales, fit_counts;
  for (std::size_t j = 0; j < rep.scales.size(); ++j)
    if (rep.values[j] >= static_cast<double>(min_count)) {
      fit_scales.push_back(rep.scales[j]);
      fit_counts.push_back(rep.values[j]);
    }
  rep.estimate = loglog_slope(fit_scales, fit_counts);
  rep.verdict = "dimension " + std::to_string(rep.estimate);
  rep.notes.push_back("fit over " + std::to_string(fit_scales.size()) + " of " +
                      std::to_string(rep.scales.size()) + " scales (N >= " + std::to_string(min_count) + ")");
  if (fit_scales.size() < 2) rep.notes.push_back("fewer than two scales in the fit");
  return rep;
}

DimensionReport assouad_scan(const FiniteMetricSpace& space, const ScaleLadder& ladder, double kappa,
                             double min_ratio) {
  require_certified(ladder, space, kappa);
  DimensionReport rep;
  rep.estimator = "assouad_scan";
  rep.scales = ladder.scales;
  for (std::size_t i = 0; i < ladder.scales.size(); ++i) {
    const double d = ladder.scales[i];
    const auto centers = eps_net(space, d);
    for (std::size_t j = i + 1; j < ladder.scales.size(); ++j) {
      const double rho = ladder.scales[j];
      if (d / rho < min_ratio * (1.0 - kDistanceTol)) continue;
      std::size_t worst = 0;
      for (std::size_t c : centers) {
        const FiniteMetricSpace ball = window(space, c, d);
        worst = std::max(worst, eps_net(ball, rho).size());
      }
      const double slope = std::log(static_cast<double>(worst)) / std::log(d / rho);
      rep.table.push_back({d, rho, static_cast<double>(worst), slope});
      rep.estimate = std::max(rep.estimate, slope);
    }
  }
  rep.verdict = rep.table.empty() ? "no scale pairs" : "assouad <= ~" + std::to_string(rep.estimate);
  return rep;
}

DimensionReport nagata_zero_constant(const FiniteMetricSpace& space, const ScaleLadder& ladder,
                                     const LightnessOptions& opts) {
  require_certified(ladder, space, opts.kappa);
  DimensionReport rep;
  rep.estimator = "nagata_zero";
  rep.scales = ladder.scales;
  const auto parts = components_profile(space, ladder, opts.components);
  for (std::size_t j = 0; j < parts.size(); ++j) {
    rep.values.push_back(parts[j].max_diameter() / ladder.scales[j]);
    rep.exact = rep.exact && !parts[j].approximate;
  }
  for (double c : rep.values) rep.estimate = std::max(rep.estimate, c);
  const auto cls = classify(rep.scales, rep.values, opts);
  rep.verdict = cls == Classification::Bounded ? "dimension-zero" : "not dimension-zero";
  rep.notes.push_back("trend " + to_string(cls) + ", slope " +
                      std::to_string(loglog_slope(rep.scales, rep.values)));
  return rep;
}

DimensionReport porosity_constant(const FiniteMetricSpace& space, const ScaleLadder& ladder,
                                  double threshold, double delta, double kappa) {
  const auto& rule = space.rule();
  if (rule->kind() != MetricKind::Euclidean || rule->width() != 1)
    throw std::domain_error("porosity is defined here for subsets of the line");
  require_certified(ladder, space, kappa);
  if (delta < 0.0) delta = space.resolution();
  std::vector<double> e(space.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = space.coords(i)[rule->offset()];
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  const std::size_t n = e.size();

  // Sparse table over the open gaps between consecutive thickened points.
  std::vector<std::vector<double>> table;
  if (n > 1) {
    table.emplace_back(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) table[0][i] = e[i + 1] - e[i] - 2.0 * delta;
    for (std::size_t len = 2; len <= n - 1; len *= 2) {
      const auto& prev = table.back();
      std::vector<double> next(n - len);
      for (std::size_t i = 0; i + len <= n - 1; ++i) next[i] = std::max(prev[i], prev[i + len / 2]);
      table.push_back(std::move(next));
    }
  }
  auto gap_max = [&](std::size_t a, std::size_t b) {  // gaps a..b-1, a < b
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= b - a) ++level;
    return std::max(table[level][a], table[level][b - (std::size_t{1} << level)]);
  };

  DimensionReport rep;
  rep.estimator = "porosity";
  rep.scales = ladder.scales;
  rep.estimate = std::numeric_limits<double>::infinity();
  for (double r : ladder.scales) {
    double worst = std::numeric_limits<double>::infinity();
    double worst_x = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      const double a = e[x] - r, b = e[x] + r;
      // First and last thickened points reaching into (a, b).
      const auto i0 = static_cast<std::size_t>(std::upper_bound(e.begin(), e.end(), a - delta) - e.begin());
      const auto i1 = static_cast<std::size_t>(std::lower_bound(e.begin(), e.end(), b + delta) - e.begin()) - 1;
      double hole = std::max(0.0, e[i0] - delta - a);
      hole = std::max(hole, b - (e[i1] + delta));
      if (i1 > i0) hole = std::max(hole, std::min(gap_max(i0, i1), b - a));
      const double c = std::max(0.0, hole) / (2.0 * r);
      if (c < worst) {
        worst = c;
        worst_x = e[x];
      }
    }
    rep.values.push_back(worst);
    rep.table.push_back({r, worst, worst_x});
    rep.estimate = std::min(rep.estimate, worst);
  }
  if (rep.scales.empty()) rep.estimate = 0.0;
  rep.verdict = rep.estimate >= threshold ? "porous" : "not porous";
  rep.notes.push_back("thickening delta " + std::to_string(delta) + ", threshold " + std::to_string(threshold));
  return rep;
}

// ---------------------------------------------------------------------------
// Self-covering

namespace {

/// Nearest-point queries at one fixed radius on a Euclidean cloud.
class Locator {
 public:
  Locator(const FiniteMetricSpace& space, double cell) : space_(space), cell_(cell) {
    off_ = space.rule()->offset();
    dim_ = space.rule()->width();
    std::vector<std::pair<std::vector<std::int64_t>, std::size_t>> keyed;
    for (std::size_t i = 0; i < space.size(); ++i) keyed.push_back({key(space.coords(i).data() + off_), i});
    std::sort(keyed.begin(), keyed.end());
    for (auto& [k, i] : keyed) {
      keys_.push_back(std::move(k));
      points_.push_back(i);
    }
  }

  /// True when some sample point lies within `radius` (≤ cell) of q.
  bool near(const std::vector<double>& q, double radius) const {
    const auto base = key(q.data());
    std::vector<std::int64_t> probe(dim_);
    const std::size_t combos = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(dim_)));
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t rest = c;
      for (std::size_t a = 0; a < dim_; ++a) {
        probe[a] = base[a] + static_cast<std::int64_t>(rest % 3) - 1;
        rest /= 3;
      }
      auto [lo, hi] = std::equal_range(keys_.begin(), keys_.end(), probe);
      for (auto it = lo; it != hi; ++it) {
        auto p = space_.coords(points_[static_cast<std::size_t>(it - keys_.begin())]);
        double s = 0.0;
        for (std::size_t a = 0; a < dim_; ++a) s += (p[off_ + a] - q[a]) * (p[off_ + a] - q[a]);
        if (within(std::sqrt(s), radius)) return true;
      }
    }
    return false;
  }

 private:
  std::vector<std::int64_t> key(const double* x) const {
    std::vector<std::int64_t> k(dim_);
    for (std::size_t a = 0; a < dim_; ++a) k[a] = static_cast<std::int64_t>(std::floor(x[a] / cell_));
    return k;
  }

  const FiniteMetricSpace& space_;
  double cell_;
  std::size_t off_ = 0, dim_ = 0;
  std::vector<std::vector<std::int64_t>> keys_;
  std::vector<std::size_t> points_;
};

}  // namespace

SelfCoveringReport self_covering_check(const FiniteMetricSpace& k, const std::vector<CopySpec>& copies,
                                       const std::vector<CoveringSample>& samples,
                                       std::size_t n_max, double c_max) {
  if (k.rule()->kind() != MetricKind::Euclidean)
    throw std::domain_error("self-covering check needs a Euclidean sample");
  const std::size_t off = k.rule()->offset(), dim = k.rule()->width();
  for (const auto& c : copies)
    if (c.shift.size() != dim || !(c.scale > 0.0)) throw std::domain_error("malformed copy");
  std::vector<double> lo, hi;
  k.bounds({}, lo, hi);
  const double diam = k.diameter();
  const double delta = k.resolution();
  Locator locator(k, delta);

  std::vector<double> scales;
  for (const auto& c : copies) scales.push_back(c.scale);
  std::sort(scales.begin(), scales.end());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());

  SelfCoveringReport rep;
  for (std::size_t si = 0; si < samples.size(); ++si) {
    const auto& sample = samples[si];
    ++rep.samples;
    const auto ball = ball_members(k, sample.center, sample.radius);
    auto x = k.coords(sample.center);
    bool accepted = false;
    std::vector<PointId> missing;
    for (double s : scales) {
      if (s * diam > c_max * sample.radius * (1.0 + kDistanceTol)) break;
      std::vector<const CopySpec*> meet;
      for (const auto& c : copies) {
        if (c.scale != s) continue;
        double dist2 = 0.0;
        for (std::size_t a = 0; a < dim; ++a) {
          const double blo = s * lo[off + a] + c.shift[a], bhi = s * hi[off + a] + c.shift[a];
          const double v = x[off + a];
          const double gap = v < blo ? blo - v : (v > bhi ? v - bhi : 0.0);
          dist2 += gap * gap;
        }
        if (within(std::sqrt(dist2), sample.radius)) meet.push_back(&c);
      }
      if (meet.size() > n_max) continue;
      missing.clear();
      std::vector<double> q(dim);
      for (std::size_t p : ball) {
        auto c = k.coords(p);
        bool covered = false;
        for (const CopySpec* copy : meet) {
          for (std::size_t a = 0; a < dim; ++a) q[a] = (c[off + a] - copy->shift[a]) / s;
          if (locator.near(q, delta)) {
            covered = true;
            break;
          }
        }
        if (!covered) missing.push_back(k.id(p));
      }
      if (missing.empty()) {
        accepted = true;
        rep.achieved_n = std::max(rep.achieved_n, meet.size());
        rep.achieved_c = std::max(rep.achieved_c, s * diam / sample.radius);
        break;
      }
    }
    if (!accepted) {
      if (rep.passed) rep.uncovered = missing;
      rep.passed = false;
      rep.failing_samples.push_back(si);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Projection search

UpperSearchReport lipdim_upper_search(SpacePtr space, const std::vector<std::vector<double>>& directions,
                                      const ScaleLadder& ladder, const LightnessOptions& opts,
                                      bool stop_early) {
  require_ambient_slots(*space, "projection search");
  const std::size_t n = space->record_width();
  UpperSearchReport rep;
  auto run = [&](std::size_t k, const SampledMap& map) {
    UpperSearchEntry entry{k, map.name, ll_profile(map, ladder, opts)};
    const bool bounded = entry.profile.classification == Classification::Bounded;
    rep.entries.push_back(std::move(entry));
    if (bounded && !rep.certified) {
      rep.certified = true;
      rep.k = k;
    }
  };
  for (std::size_t k = 0; k <= n; ++k) {
    if (k == 0) {
      run(0, constant_map(space));
    } else {
      // Coordinate subspaces of size k in lexicographic order.
      std::vector<std::size_t> pick(k);
      for (std::size_t a = 0; a < k; ++a) pick[a] = a;
      for (;;) {
        run(k, coordinate_projection(space, pick));
        std::size_t a = k;
        while (a > 0 && pick[a - 1] == n - k + a - 1) --a;
        if (a == 0) break;
        ++pick[a - 1];
        for (std::size_t b = a; b < k; ++b) pick[b] = pick[b - 1] + 1;
      }
      for (std::size_t d = 0; d < directions.size(); ++d) {
        const auto& v = directions[d];
        const std::string tag = "[" + std::to_string(d) + "]";
        if (k == 1) {
          SampledMap m = line_projection(space, v);
          m.name += tag;
          run(k, m);
        }
        if (k + 1 == n) {
          SampledMap m = direction_projection(space, v);
          m.name += tag;
          run(k, m);
        }
        if (k == n && n > 1) {
          MapSpec frame{"frame", {}, v, {}, 0, 0};
          SampledMap m = build_map(frame, space);
          m.name += tag;
          run(k, m);
        }
      }
    }
    if (rep.certified && stop_early) break;
  }
  rep.verdict = rep.certified ? "k = " + std::to_string(rep.k) : "no certificate";
  return rep;
}

}  // namespace lipdim
