#include "lipdim/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace lipdim {

FiniteMetricSpace::FiniteMetricSpace(std::vector<PointId> ids, std::vector<double> coords,
                                     std::size_t record_width, RulePtr rule, double resolution)
    : width_(record_width), rule_(std::move(rule)), resolution_(resolution) {
  if (!rule_) throw std::domain_error("metric rule must be set");
  if (coords.size() != ids.size() * record_width)
    throw std::domain_error("coordinate buffer does not match point count");
  if (rule_->offset() + rule_->width() > record_width)
    throw std::domain_error("metric rule reads past the coordinate record");
  for (double c : coords)
    if (!std::isfinite(c)) throw std::domain_error("coordinates must be finite");
  ids_ = std::make_shared<const std::vector<PointId>>(std::move(ids));
  coords_ = std::make_shared<const std::vector<double>>(std::move(coords));
  cache_ = std::make_shared<Cache>();
  resolution_once_ = std::make_shared<std::once_flag>();
  computed_resolution_ = std::make_shared<double>(resolution_);
}

std::optional<std::size_t> FiniteMetricSpace::index_of(PointId id) const {
  const auto& v = *ids_;
  // Generated spaces use ids == positions; check that first.
  if (id >= 0 && static_cast<std::size_t>(id) < v.size() && v[static_cast<std::size_t>(id)] == id)
    return static_cast<std::size_t>(id);
  auto it = std::find(v.begin(), v.end(), id);
  if (it == v.end()) return std::nullopt;
  return static_cast<std::size_t>(it - v.begin());
}

double FiniteMetricSpace::distance(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw std::domain_error("point index out of range");
  return d(i, j);
}

double FiniteMetricSpace::distance_by_id(PointId a, PointId b) const {
  auto i = index_of(a);
  auto j = index_of(b);
  if (!i || !j) throw std::domain_error("unknown point id");
  return d(*i, *j);
}

bool FiniteMetricSpace::precompute_distances(std::size_t cap) const {
  if (size() > cap || !cache_) return false;
  std::call_once(cache_->once, [this] {
    const std::size_t n = size();
    std::vector<double> values(n < 2 ? 0 : n * (n - 1) / 2);
    for (std::size_t j = 1; j < n; ++j)
      for (std::size_t i = 0; i < j; ++i)
        values[tri_index(i, j)] =
            (*rule_)(coords_->data() + i * width_, coords_->data() + j * width_);
    cache_->values = std::move(values);
    cache_->ready.store(true, std::memory_order_release);
  });
  return true;
}

double FiniteMetricSpace::resolution() const {
  if (resolution_ > 0.0 || size() < 2) return resolution_;
  std::call_once(*resolution_once_, [this] {
    const std::size_t n = size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double nn = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) nn = std::min(nn, d(i, j));
      worst = std::max(worst, nn);
    }
    *computed_resolution_ = worst;
  });
  return *computed_resolution_;
}

double FiniteMetricSpace::diameter() const {
  double best = 0.0;
  const std::size_t n = size();
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) best = std::max(best, d(i, j));
  return best;
}

FiniteMetricSpace FiniteMetricSpace::subset(std::span<const std::size_t> positions) const {
  std::vector<PointId> ids;
  std::vector<double> coords;
  ids.reserve(positions.size());
  coords.reserve(positions.size() * width_);
  for (std::size_t p : positions) {
    if (p >= size()) throw std::domain_error("subset position out of range");
    ids.push_back(id(p));
    auto c = this->coords(p);
    coords.insert(coords.end(), c.begin(), c.end());
  }
  return FiniteMetricSpace(std::move(ids), std::move(coords), width_, rule_, resolution_);
}

FiniteMetricSpace FiniteMetricSpace::with_rule(RulePtr rule, double resolution) const {
  return FiniteMetricSpace(*ids_, *coords_, width_, std::move(rule), resolution);
}

void FiniteMetricSpace::bounds(std::span<const std::size_t> positions, std::vector<double>& lo,
                               std::vector<double>& hi) const {
  lo.assign(width_, std::numeric_limits<double>::infinity());
  hi.assign(width_, -std::numeric_limits<double>::infinity());
  auto visit = [&](std::size_t p) {
    auto c = coords(p);
    for (std::size_t k = 0; k < width_; ++k) {
      lo[k] = std::min(lo[k], c[k]);
      hi[k] = std::max(hi[k], c[k]);
    }
  };
  if (positions.empty()) {
    for (std::size_t p = 0; p < size(); ++p) visit(p);
  } else {
    for (std::size_t p : positions) visit(p);
  }
}

// ---------------------------------------------------------------------------

ScaleLadder make_ladder(double r_max, double ratio, double floor) {
  if (!(r_max > 0.0)) throw std::domain_error("ladder top scale must be positive");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::domain_error("ladder ratio must lie in (0, 1)");
  ScaleLadder ladder;
  ladder.ratio = ratio;
  ladder.floor = floor;
  double r = r_max;
  // r_{j+1} = ratio * r_j exactly
  while (r >= floor * (1.0 - kDistanceTol)) {
    ladder.scales.push_back(r);
    r = ratio * r;
    if (ladder.scales.size() > 200) break;
  }
  return ladder;
}

ScaleLadder certified_ladder(const FiniteMetricSpace& space, double r_max, double ratio,
                             double kappa) {
  return make_ladder(r_max, ratio, kappa * space.resolution());
}

void require_certified(const ScaleLadder& ladder, const FiniteMetricSpace& space, double kappa) {
  const double floor = kappa * space.resolution();
  for (double r : ladder.scales) {
    if (r < floor * (1.0 - kDistanceTol)) {
      std::ostringstream os;
      os << "scale " << r << " is below the certified floor kappa*resolution = " << kappa
         << " * " << space.resolution() << " = " << floor << " (kappa=" << kappa << ")";
      throw std::domain_error(os.str());
    }
  }
}

std::vector<std::size_t> eps_net(const FiniteMetricSpace& space, double eps,
                                 std::span<const std::size_t> seed) {
  if (!(eps > 0.0)) throw std::domain_error("eps must be positive");
  const std::size_t n = space.size();
  std::vector<std::size_t> net;
  if (n == 0) return net;
  std::vector<double> gap(n, std::numeric_limits<double>::infinity());
  auto add = [&](std::size_t p) {
    net.push_back(p);
    for (std::size_t q = 0; q < n; ++q) gap[q] = std::min(gap[q], space.d(p, q));
  };
  if (seed.empty()) {
    std::size_t first = 0;
    for (std::size_t p = 1; p < n; ++p)
      if (space.id(p) < space.id(first)) first = p;
    add(first);
  } else {
    for (std::size_t p : seed) add(p);
  }
  for (;;) {
    std::size_t best = n;
    for (std::size_t q = 0; q < n; ++q) {
      if (best == n || gap[q] > gap[best] ||
          (gap[q] == gap[best] && space.id(q) < space.id(best)))
        best = q;
    }
    if (best == n || gap[best] < eps) break;
    add(best);
  }
  return net;
}

std::vector<std::size_t> ball_members(const FiniteMetricSpace& space, std::size_t center,
                                      double radius) {
  if (center >= space.size()) throw std::domain_error("window center out of range");
  if (!(radius > 0.0)) throw std::domain_error("window radius must be positive");
  std::vector<std::size_t> members;
  for (std::size_t q = 0; q < space.size(); ++q)
    if (within(space.d(center, q), radius)) members.push_back(q);
  return members;
}

FiniteMetricSpace window(const FiniteMetricSpace& space, std::size_t center, double radius) {
  auto members = ball_members(space, center, radius);
  return space.subset(members);
}

FiniteMetricSpace rescale(const FiniteMetricSpace& space, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("rescale factor must be positive");
  return space.with_rule(rescale_rule(space.rule(), lambda), space.resolution() * lambda);
}

MetricAxiomReport check_metric_axioms(const FiniteMetricSpace& space, std::size_t samples,
                                      std::uint64_t seed) {
  MetricAxiomReport rep;
  const std::size_t n = space.size();
  if (n == 0) return rep;
  const double tol = 1e-9 * std::max(1.0, n <= 300 ? space.diameter() : 1.0);
  auto check = [&](std::size_t i, std::size_t j, std::size_t k) {
    ++rep.triples_checked;
    const double dij = space.d(i, j);
    if (!std::isfinite(dij) || dij < 0.0) {
      rep.ok = false;
      rep.message = "non-finite or negative distance";
    }
    const double excess = dij - space.d(i, k) - space.d(k, j);
    rep.worst_violation = std::max(rep.worst_violation, excess);
    if (excess > tol) {
      rep.ok = false;
      rep.message = "triangle inequality violated";
    }
  };
  for (std::size_t i = 0; i < n; ++i)
    if ((*space.rule())(space.coords(i).data(), space.coords(i).data()) != 0.0) {
      rep.ok = false;
      rep.message = "d(i,i) != 0";
    }
  if (n <= 300) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) check(i, j, k);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < samples; ++s) check(pick(rng), pick(rng), pick(rng));
  }
  return rep;
}

}  // namespace lipdim
