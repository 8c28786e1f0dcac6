#include "lipdim/lightness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "lipdim/parallel.hpp"

namespace lipdim {

void SampledMap::validate() const {
  if (!domain || !codomain) throw std::domain_error("map '" + name + "' lacks a domain or codomain");
  if (pairing.size() != domain->size())
    throw std::domain_error("map '" + name + "' pairing is not total on the domain");
  for (std::size_t c : pairing)
    if (c >= codomain->size())
      throw std::domain_error("map '" + name + "' pairs into an invalid codomain index");
}

std::vector<std::vector<std::size_t>> SampledMap::fibers() const {
  std::vector<std::vector<std::size_t>> out(codomain->size());
  for (std::size_t x = 0; x < pairing.size(); ++x) out[pairing[x]].push_back(x);
  return out;
}

SampledMap make_map(std::string name, SpacePtr domain, SpacePtr codomain,
                    std::vector<std::size_t> pairing) {
  SampledMap map{std::move(name), std::move(domain), std::move(codomain), std::move(pairing)};
  map.validate();
  return map;
}

std::string to_string(WindowMode mode) {
  switch (mode) {
    case WindowMode::Ball: return "ball";
    case WindowMode::Grid: return "grid";
    case WindowMode::BallAndGrid: return "ball+grid";
    case WindowMode::Diam: return "diam";
  }
  return "unknown";
}

WindowMode parse_window_mode(const std::string& text) {
  if (text == "ball") return WindowMode::Ball;
  if (text == "grid") return WindowMode::Grid;
  if (text == "ball+grid") return WindowMode::BallAndGrid;
  if (text == "diam") return WindowMode::Diam;
  throw std::domain_error("unknown window mode '" + text + "' (expected ball|grid|ball+grid|diam)");
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Bounded: return "bounded";
    case Classification::Diverging: return "diverging";
    case Classification::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

std::size_t grid_dimension(const SampledMap& map) {
  const auto& rule = map.codomain->rule();
  if (rule->kind() != MetricKind::Euclidean)
    throw std::domain_error("grid windows need a Euclidean codomain");
  return rule->width();
}

std::vector<std::int64_t> grid_cell(std::span<const double> y, std::size_t offset, std::size_t k,
                                    double side, int lattice) {
  const double shift = lattice == 0 ? 0.0 : 0.5 * side;
  std::vector<std::int64_t> cell(k);
  for (std::size_t a = 0; a < k; ++a)
    cell[a] = static_cast<std::int64_t>(std::floor((y[offset + a] - shift) / side));
  return cell;
}

/// Ball windows come first and are centred at ball_centers; their images are
/// built on demand (materialising them all is quadratic in the image size at
/// coarse scales). Grid windows follow with stored images.
struct WindowSet {
  std::vector<Window> windows;
  std::vector<std::size_t> ball_centers;
  std::unique_ptr<NeighborGrid> ball_grid;
  double radius = 0.0;
  std::vector<std::vector<std::size_t>> grid_images;

  std::vector<std::size_t> image(const FiniteMetricSpace& codomain, std::size_t i) const {
    const std::size_t balls = ball_centers.size();
    if (i >= balls) return grid_images[i - balls];
    std::vector<std::size_t> out{ball_centers[i]};
    ball_grid->for_each_near(i, [&](std::size_t b) {
      if (within(codomain.d(ball_centers[i], ball_centers[b]), radius)) out.push_back(ball_centers[b]);
    });
    std::sort(out.begin(), out.end());
    return out;
  }
};

std::vector<std::size_t> image_points(const SampledMap& map) {
  std::vector<char> hit(map.codomain->size(), 0);
  for (std::size_t c : map.pairing) hit[c] = 1;
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < hit.size(); ++c)
    if (hit[c]) out.push_back(c);
  return out;
}

void add_ball_windows(const SampledMap& map, const std::vector<std::size_t>& image, double r,
                      WindowMode kind, WindowSet& set) {
  set.radius = 0.5 * r;
  set.ball_centers = image;
  set.ball_grid = std::make_unique<NeighborGrid>(*map.codomain, set.ball_centers, set.radius);
  for (std::size_t c : image) {
    Window w;
    w.kind = kind;
    w.center = c;
    w.radius = set.radius;
    set.windows.push_back(std::move(w));
  }
}

void add_grid_windows(const SampledMap& map, const std::vector<std::size_t>& image, double r,
                      WindowSet& set) {
  const std::size_t k = grid_dimension(map);
  const std::size_t offset = map.codomain->rule()->offset();
  if (k == 0) {
    Window w;
    w.kind = WindowMode::Grid;
    set.windows.push_back(w);
    set.grid_images.push_back(image);
    return;
  }
  const double side = r / std::sqrt(static_cast<double>(k));
  for (int lattice = 0; lattice < 2; ++lattice) {
    std::map<std::vector<std::int64_t>, std::vector<std::size_t>> cells;
    for (std::size_t c : image)
      cells[grid_cell(map.codomain->coords(c), offset, k, side, lattice)].push_back(c);
    for (auto& [cell, members] : cells) {
      Window w;
      w.kind = WindowMode::Grid;
      w.lattice = lattice;
      w.cell = cell;
      w.side = side;
      set.windows.push_back(std::move(w));
      set.grid_images.push_back(std::move(members));
    }
  }
}

WindowSet make_windows(const SampledMap& map, double r, WindowMode mode) {
  WindowSet set;
  const auto image = image_points(map);
  switch (mode) {
    case WindowMode::Ball:
      add_ball_windows(map, image, r, WindowMode::Ball, set);
      break;
    case WindowMode::Grid:
      add_grid_windows(map, image, r, set);
      break;
    case WindowMode::BallAndGrid:
      add_ball_windows(map, image, r, WindowMode::Ball, set);
      add_grid_windows(map, image, r, set);
      break;
    case WindowMode::Diam:
      add_ball_windows(map, image, r, WindowMode::Diam, set);
      break;
  }
  return set;
}

std::vector<std::size_t> preimage_of(const std::vector<std::vector<std::size_t>>& fibers,
                                     const std::vector<std::size_t>& image) {
  std::vector<std::size_t> pre;
  for (std::size_t c : image) pre.insert(pre.end(), fibers[c].begin(), fibers[c].end());
  std::sort(pre.begin(), pre.end());
  return pre;
}

struct WindowResult {
  double constant = 0.0;
  double diameter = 0.0;
  double path_scale = 0.0;
  std::size_t far_a = 0;
  std::size_t far_b = 0;
  std::size_t preimage = 0;
  bool exact = true;
  bool tested = false;
};

}  // namespace

std::vector<std::size_t> window_image(const SampledMap& map, const Window& w) {
  std::vector<std::size_t> out;
  const auto image = image_points(map);
  if (w.kind == WindowMode::Grid) {
    const std::size_t k = grid_dimension(map);
    const std::size_t offset = map.codomain->rule()->offset();
    for (std::size_t c : image)
      if (k == 0 || grid_cell(map.codomain->coords(c), offset, k, w.side, w.lattice) == w.cell)
        out.push_back(c);
    return out;
  }
  for (std::size_t c : image)
    if (within(map.codomain->d(w.center, c), w.radius)) out.push_back(c);
  return out;
}

ScaleResult ll_constant_at_scale(const SampledMap& map, double r, const LightnessOptions& opts) {
  if (!(r > 0.0)) throw std::domain_error("scale r must be positive");
  map.validate();
  const FiniteMetricSpace& dom = *map.domain;
  dom.precompute_distances();  // windows overlap heavily; no-op on large domains
  const auto fibers = map.fibers();
  WindowSet set = make_windows(map, r, opts.windows);

  std::vector<WindowResult> results(set.windows.size());
  parallel_for(set.windows.size(), opts.threads, [&](std::size_t i) {
    const auto img = set.image(*map.codomain, i);
    const auto pre = preimage_of(fibers, img);
    if (pre.empty()) return;
    double scale = r;
    if (set.windows[i].kind == WindowMode::Diam) {
      scale = set_diameter(*map.codomain, img).value;
      if (!(scale > 0.0)) return;  // singleton W: all 0-components are points
    }
    const auto largest = largest_component(dom, pre, scale, opts.components);
    WindowResult& res = results[i];
    res.tested = true;
    res.diameter = largest.diameter;
    res.path_scale = scale;
    res.constant = largest.diameter / scale;
    res.far_a = largest.far_a;
    res.far_b = largest.far_b;
    res.preimage = pre.size();
    res.exact = largest.exact;
  });

  ScaleResult out;
  std::size_t best = results.size();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].tested) continue;
    ++out.windows_tested;
    out.exact = out.exact && results[i].exact;
    if (best == results.size() || results[i].constant > results[best].constant) best = i;
  }
  out.witness.scale = r;
  if (best == results.size()) return out;

  const WindowResult& res = results[best];
  out.constant = res.constant;
  Witness& w = out.witness;
  w.path_scale = res.path_scale;
  w.diameter = res.diameter;
  w.constant = res.constant;
  w.window = set.windows[best];
  const auto img = set.image(*map.codomain, best);
  w.window_points = img.size();
  w.preimage_points = res.preimage;
  w.from = dom.id(res.far_a);
  w.to = dom.id(res.far_b);
  w.exact = res.exact;
  const auto pre = preimage_of(fibers, img);
  for (std::size_t p : r_path(dom, pre, res.path_scale, res.far_a, res.far_b))
    w.path.push_back(dom.id(p));
  return out;
}

double evaluate_witness(const SampledMap& map, const Witness& witness,
                        const ComponentOptions& opts) {
  const auto image = window_image(map, witness.window);
  const auto pre = preimage_of(map.fibers(), image);
  auto from = map.domain->index_of(witness.from);
  if (!from || pre.empty()) return 0.0;
  const auto part = components_of(*map.domain, pre, witness.path_scale, opts);
  for (std::size_t a = 0; a < pre.size(); ++a)
    if (pre[a] == *from) return part.diameter[part.component[a]];
  return 0.0;
}

LipschitzEstimate lipschitz_constant(const SampledMap& map, std::size_t cap) {
  map.validate();
  const FiniteMetricSpace& dom = *map.domain;
  const FiniteMetricSpace& cod = *map.codomain;
  LipschitzEstimate est;
  const std::size_t n = dom.size();
  if (n < 2) {
    est.sample = n;
    return est;
  }
  std::vector<std::size_t> sample;
  if (n <= cap) {
    sample.resize(n);
    std::iota(sample.begin(), sample.end(), std::size_t{0});
  } else {
    // Farthest-point prefix of a strided pre-sample.
    est.exact = false;
    std::vector<std::size_t> pre;
    const std::size_t stride = std::max<std::size_t>(1, n / (8 * cap));
    for (std::size_t p = 0; p < n; p += stride) pre.push_back(p);
    const FiniteMetricSpace sub = dom.subset(pre);
    std::vector<double> gap(pre.size(), std::numeric_limits<double>::infinity());
    std::size_t cur = 0;
    while (sample.size() < cap) {
      sample.push_back(pre[cur]);
      std::size_t next = 0;
      for (std::size_t q = 0; q < pre.size(); ++q) {
        gap[q] = std::min(gap[q], sub.d(cur, q));
        if (gap[q] > gap[next]) next = q;
      }
      if (!(gap[next] > 0.0)) break;
      cur = next;
    }
    std::sort(sample.begin(), sample.end());
  }
  est.sample = sample.size();
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < sample.size(); ++a)
    for (std::size_t b = a + 1; b < sample.size(); ++b) {
      const double dx = dom.d(sample[a], sample[b]);
      if (!(dx > 0.0)) continue;
      const double ratio = cod.d(map.pairing[sample[a]], map.pairing[sample[b]]) / dx;
      hi = std::max(hi, ratio);
      lo = std::min(lo, ratio);
    }
  est.max_ratio = hi;
  est.min_ratio = std::isfinite(lo) ? lo : 0.0;
  return est;
}

double LightnessProfile::max_constant() const {
  return constants.empty() ? 0.0 : *std::max_element(constants.begin(), constants.end());
}

double loglog_slope(const std::vector<double>& scales, const std::vector<double>& values) {
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < scales.size() && j < values.size(); ++j) {
    if (!(values[j] > 0.0) || !(scales[j] > 0.0)) continue;
    xs.push_back(std::log(1.0 / scales[j]));
    ys.push_back(std::log(values[j]));
  }
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

Classification classify(const std::vector<double>& scales, const std::vector<double>& constants,
                        const LightnessOptions& opts) {
  if (scales.size() < 2) return Classification::Inconclusive;
  const double slope = loglog_slope(scales, constants);
  if (slope < opts.bounded_slope) return Classification::Bounded;
  if (slope > opts.diverging_slope) {
    // Walk from coarse to fine scale; C may dip only by the slack factor.
    std::vector<std::size_t> order(scales.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scales[a] > scales[b]; });
    for (std::size_t k = 1; k < order.size(); ++k)
      if (constants[order[k]] < opts.monotone_slack * constants[order[k - 1]])
        return Classification::Inconclusive;
    return Classification::Diverging;
  }
  return Classification::Inconclusive;
}

LightnessProfile ll_profile(const SampledMap& map, const ScaleLadder& ladder,
                            const LightnessOptions& opts) {
  map.validate();
  require_certified(ladder, *map.domain, opts.kappa);
  LightnessProfile prof;
  prof.map_name = map.name;
  prof.windows = opts.windows;
  prof.scales = ladder.scales;
  prof.lipschitz = lipschitz_constant(map, opts.lipschitz_cap);
  for (double r : ladder.scales) {
    ScaleResult res = ll_constant_at_scale(map, r, opts);
    prof.constants.push_back(res.constant);
    prof.exact = prof.exact && res.exact;
    prof.witnesses.push_back(std::move(res.witness));
  }
  prof.slope = loglog_slope(prof.scales, prof.constants);
  prof.classification = classify(prof.scales, prof.constants, opts);
  return prof;
}

}  // namespace lipdim
