#include "lipdim/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lipdim/generators.hpp"

namespace lipdim {

SampledMap map_from_images(std::string name, SpacePtr domain, const std::vector<double>& images,
                           std::size_t k) {
  const std::size_t n = domain->size();
  if (images.size() != n * k) throw std::domain_error("image buffer does not match the domain");
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(images.begin() + a * k, images.begin() + (a + 1) * k,
                                        images.begin() + b * k, images.begin() + (b + 1) * k);
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), less);
  std::vector<std::size_t> pairing(n);
  std::vector<double> coords;
  std::size_t count = 0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    const std::size_t a = order[idx];
    if (idx == 0 || less(order[idx - 1], a)) {
      coords.insert(coords.end(), images.begin() + a * k, images.begin() + (a + 1) * k);
      ++count;
    }
    pairing[a] = count - 1;
  }
  std::vector<PointId> ids(count);
  std::iota(ids.begin(), ids.end(), PointId{0});
  auto codomain = std::make_shared<const FiniteMetricSpace>(std::move(ids), std::move(coords), k,
                                                            euclidean(k));
  return make_map(std::move(name), std::move(domain), std::move(codomain), std::move(pairing));
}

SampledMap identity_map(SpacePtr x) {
  std::vector<std::size_t> pairing(x->size());
  std::iota(pairing.begin(), pairing.end(), std::size_t{0});
  return make_map("identity", x, x, std::move(pairing));
}

SampledMap constant_map(SpacePtr x) { return map_from_images("constant", x, {}, 0); }

SampledMap linear_map(SpacePtr x, const std::vector<std::vector<double>>& rows, std::string name) {
  const std::size_t w = x->record_width();
  const std::size_t k = rows.size();
  for (const auto& row : rows)
    if (row.size() != w) throw std::domain_error("linear map rows must match the coordinate record");
  if (!x->has_ambient_coordinates())
    throw std::domain_error("linear maps need ambient coordinates");
  std::vector<double> images(x->size() * k);
  for (std::size_t i = 0; i < x->size(); ++i) {
    auto c = x->coords(i);
    for (std::size_t r = 0; r < k; ++r) {
      double s = 0.0;
      for (std::size_t a = 0; a < w; ++a) s += rows[r][a] * c[a];
      images[i * k + r] = s;
    }
  }
  return map_from_images(std::move(name), std::move(x), images, k);
}

SampledMap coordinate_projection(SpacePtr x, const std::vector<std::size_t>& slots) {
  if (!x->has_ambient_coordinates())
    throw std::domain_error("coordinate projection needs ambient coordinates");
  std::string name = "coordinates";
  for (std::size_t s : slots) {
    if (s >= x->record_width()) throw std::domain_error("projection slot out of range");
    name += "_" + std::to_string(s);
  }
  std::vector<double> images;
  images.reserve(x->size() * slots.size());
  for (std::size_t i = 0; i < x->size(); ++i)
    for (std::size_t s : slots) images.push_back(x->coords(i)[s]);
  return map_from_images(std::move(name), std::move(x), images, slots.size());
}

namespace {

std::vector<double> normalized(const std::vector<double>& v) {
  double norm = 0.0;
  for (double c : v) norm += c * c;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw std::domain_error("direction must be non-zero");
  std::vector<double> u(v);
  for (double& c : u) c /= norm;
  return u;
}

}  // namespace

std::vector<std::vector<double>> orthonormal_complement(const std::vector<double>& v) {
  const std::vector<double> u = normalized(v);
  const std::size_t n = u.size();
  std::vector<std::vector<double>> basis{u};
  // Standard basis vectors least aligned with v go first.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(u[a]) < std::abs(u[b]); });
  for (std::size_t e : order) {
    if (basis.size() == n) break;
    std::vector<double> w(n, 0.0);
    w[e] = 1.0;
    for (const auto& b : basis) {
      double dot = 0.0;
      for (std::size_t a = 0; a < n; ++a) dot += w[a] * b[a];
      for (std::size_t a = 0; a < n; ++a) w[a] -= dot * b[a];
    }
    double norm = 0.0;
    for (double c : w) norm += c * c;
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;
    for (double& c : w) c /= norm;
    basis.push_back(std::move(w));
  }
  basis.erase(basis.begin());
  return basis;
}

SampledMap direction_projection(SpacePtr x, const std::vector<double>& v) {
  if (v.size() != x->record_width()) throw std::domain_error("direction must match the coordinate record");
  return linear_map(std::move(x), orthonormal_complement(v), "direction_projection");
}

SampledMap line_projection(SpacePtr x, const std::vector<double>& v) {
  if (v.size() != x->record_width()) throw std::domain_error("direction must match the coordinate record");
  return linear_map(std::move(x), {normalized(v)}, "line_projection");
}

SampledMap product_map(const SampledMap& f, const SampledMap& g) {
  f.validate();
  g.validate();
  auto domain = std::make_shared<const FiniteMetricSpace>(product(*f.domain, *g.domain));
  auto codomain = std::make_shared<const FiniteMetricSpace>(product(*f.codomain, *g.codomain));
  const std::size_t ny = g.domain->size(), nc = g.codomain->size();
  std::vector<std::size_t> pairing(domain->size());
  for (std::size_t i = 0; i < f.domain->size(); ++i)
    for (std::size_t j = 0; j < ny; ++j) pairing[i * ny + j] = f.pairing[i] * nc + g.pairing[j];
  return make_map("(" + f.name + "," + g.name + ")", std::move(domain), std::move(codomain),
                  std::move(pairing));
}

std::vector<double> mcshane_extend(const FiniteMetricSpace& space,
                                   const std::vector<std::size_t>& subset,
                                   const std::vector<double>& values, double lipschitz) {
  if (subset.size() != values.size()) throw std::domain_error("one value per subset point is required");
  if (subset.empty()) throw std::domain_error("cannot extend from an empty set");
  if (!(lipschitz >= 0.0)) throw std::domain_error("Lipschitz constant must be non-negative");
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      const double d = space.d(subset[a], subset[b]);
      if (std::abs(values[a] - values[b]) > lipschitz * d * (1.0 + 1e-9) + 1e-12)
        throw std::domain_error("values are not L-Lipschitz on the subset");
    }
  std::vector<double> out(space.size());
  for (std::size_t z = 0; z < space.size(); ++z) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < subset.size(); ++a)
      best = std::min(best, values[a] + lipschitz * space.d(subset[a], z));
    out[z] = best;
  }
  for (std::size_t a = 0; a < subset.size(); ++a) out[subset[a]] = values[a];
  return out;
}

SampledMap union_map(SpacePtr z, const SampledMap& f, const SampledMap& g) {
  f.validate();
  g.validate();
  std::vector<char> covered(z->size(), 0);
  struct Part {
    std::vector<std::size_t> positions;               // in z
    std::vector<std::vector<double>> coordinates;     // per codomain slot
  };
  auto collect = [&](const SampledMap& m) {
    const auto& rule = m.codomain->rule();
    if (rule->kind() != MetricKind::Euclidean)
      throw std::domain_error("union map needs Euclidean codomains");
    Part part;
    part.coordinates.resize(rule->width());
    for (std::size_t i = 0; i < m.domain->size(); ++i) {
      auto pos = z->index_of(m.domain->id(i));
      if (!pos) throw std::domain_error("map domain is not a subset of Z");
      covered[*pos] = 1;
      part.positions.push_back(*pos);
      auto c = m.codomain->coords(m.pairing[i]);
      for (std::size_t s = 0; s < rule->width(); ++s) part.coordinates[s].push_back(c[rule->offset() + s]);
    }
    return part;
  };
  const Part pf = collect(f);
  const Part pg = collect(g);
  if (std::find(covered.begin(), covered.end(), 0) != covered.end())
    throw std::domain_error("the two domains do not cover Z");

  std::vector<std::vector<double>> columns;
  for (const Part* p : {&pf, &pg})
    for (const auto& vals : p->coordinates) {
      double lip = 0.0;
      for (std::size_t a = 0; a < vals.size(); ++a)
        for (std::size_t b = a + 1; b < vals.size(); ++b) {
          const double d = z->d(p->positions[a], p->positions[b]);
          if (d > 0.0) lip = std::max(lip, std::abs(vals[a] - vals[b]) / d);
        }
      columns.push_back(mcshane_extend(*z, p->positions, vals, lip));
    }
  const std::size_t k = columns.size();
  std::vector<double> images(z->size() * k);
  for (std::size_t i = 0; i < z->size(); ++i)
    for (std::size_t s = 0; s < k; ++s) images[i * k + s] = columns[s][i];
  return map_from_images("union(" + f.name + "," + g.name + ")", std::move(z), images, k);
}

CantorCoding cantor_coding_map(SpacePtr y, int depth, std::size_t alphabet_cap) {
  if (depth < 1) throw std::domain_error("coding depth must be at least 1");
  const double diam = y->diameter();
  if (std::abs(diam - 1.0) > 1e-9) throw std::domain_error("coding needs diam(Y) = 1; rescale first");
  const FiniteMetricSpace& Y = *y;
  CantorCoding out;

  // Nested greedy nets N_1 ⊆ ... ⊆ N_D with N_k a 2^-k net.
  std::vector<std::size_t> current;
  for (int k = 1; k <= depth; ++k) {
    const auto net = eps_net(Y, std::ldexp(1.0, -k), current);
    if (!std::equal(current.begin(), current.end(), net.begin()))
      throw std::logic_error("nets are not nested");
    current = net;
    out.nets.push_back(net);
  }

  // Letter assignments: nearest-first from the anchor, surplus letters on it.
  auto ordered_from = [&](std::size_t anchor, std::vector<std::size_t> pts) {
    std::stable_sort(pts.begin(), pts.end(), [&](std::size_t a, std::size_t b) {
      const double da = Y.d(anchor, a), db = Y.d(anchor, b);
      if (da != db) return da < db;
      return Y.id(a) < Y.id(b);
    });
    return pts;
  };
  const std::vector<std::size_t> first = ordered_from(out.nets[0].front(), out.nets[0]);
  std::vector<std::vector<std::vector<std::size_t>>> children(static_cast<std::size_t>(depth));
  std::size_t m = first.size();
  for (int k = 1; k < depth; ++k) {
    const auto& coarse = out.nets[static_cast<std::size_t>(k - 1)];
    const auto& fine = out.nets[static_cast<std::size_t>(k)];
    auto& level = children[static_cast<std::size_t>(k)];
    level.assign(Y.size(), {});
    for (std::size_t p : coarse) {
      std::vector<std::size_t> near;
      for (std::size_t q : fine)
        if (Y.d(p, q) <= std::ldexp(1.0, -k)) near.push_back(q);
      auto ordered = ordered_from(p, std::move(near));
      if (ordered.empty() || ordered.front() != p) throw std::logic_error("y must lie in N_{k+1}(y)");
      m = std::max(m, ordered.size());
      level[p] = std::move(ordered);
    }
  }
  if (m > alphabet_cap)
    throw BudgetError("coding alphabet of size " + std::to_string(m) + " exceeds the cap " +
                      std::to_string(alphabet_cap));
  out.alphabet = m;
  auto source = std::make_shared<const FiniteMetricSpace>(word_cantor(static_cast<int>(m), depth));
  out.source = source;

  std::vector<std::size_t> pairing(source->size());
  for (std::size_t w = 0; w < source->size(); ++w) {
    auto letters = source->coords(w);
    auto pick = [](const std::vector<std::size_t>& list, double letter) {
      const auto idx = static_cast<std::size_t>(letter) - 1;
      return idx < list.size() ? list[idx] : list.front();
    };
    std::size_t cur = pick(first, letters[0]);
    for (int k = 1; k < depth; ++k)
      cur = pick(children[static_cast<std::size_t>(k)][cur], letters[static_cast<std::size_t>(k)]);
    pairing[w] = cur;
  }
  out.map = make_map("cantor_coding", source, y, std::move(pairing));
  return out;
}

SampledMap tree_root_map(SpacePtr t, PointId root) {
  auto r = t->index_of(root);
  if (!r) throw std::domain_error("unknown root id");
  std::vector<double> images(t->size());
  for (std::size_t i = 0; i < t->size(); ++i) images[i] = t->d(*r, i);
  return map_from_images("root_distance", std::move(t), images, 1);
}

SampledMap abs_fold_map(SpacePtr x) {
  const auto& rule = x->rule();
  if (rule->kind() != MetricKind::Euclidean || rule->width() != 1)
    throw std::domain_error("abs fold needs a subset of the line");
  std::vector<double> images(x->size());
  for (std::size_t i = 0; i < x->size(); ++i) images[i] = std::abs(x->coords(i)[rule->offset()]);
  return map_from_images("abs_fold", std::move(x), images, 1);
}

// ---------------------------------------------------------------------------
// David–Semmes regularity

namespace {

/// Smallest C ≥ 1 such that `count(C·r) ≤ C`, given a non-increasing cover
/// count. C* = min over N of max(N, rho_N / r).
double ds_window_constant(const std::function<std::size_t(double)>& count, double spread, double r) {
  std::size_t n0 = 1;
  while (count(static_cast<double>(n0) * r) > n0) ++n0;
  if (n0 == 1) return 1.0;
  // rho_{n0-1}: minimal radius covering with n0-1 balls.
  double lo = 0.0, hi = spread;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count(mid) <= n0 - 1) hi = mid;
    else lo = mid;
  }
  return std::min(static_cast<double>(n0), hi / r);
}

}  // namespace

DavidSemmesScan david_semmes_constant(const SampledMap& map, const ScaleLadder& ladder) {
  map.validate();
  const FiniteMetricSpace& dom = *map.domain;
  const FiniteMetricSpace& cod = *map.codomain;
  const auto fibers = map.fibers();
  std::vector<std::size_t> image;
  for (std::size_t c = 0; c < cod.size(); ++c)
    if (!fibers[c].empty()) image.push_back(c);
  const auto& rule = dom.rule();
  const bool line = rule->kind() == MetricKind::Euclidean && rule->width() == 1;

  DavidSemmesScan out;
  out.exact = line;
  for (double r : ladder.scales) {
    std::vector<std::vector<std::size_t>> near(image.size());
    for (std::size_t a = 0; a < image.size(); ++a) near[a].push_back(image[a]);
    NeighborGrid grid(cod, image, r);
    grid.for_each_candidate([&](std::size_t a, std::size_t b) {
      if (within(cod.d(image[a], image[b]), r)) {
        near[a].push_back(image[b]);
        near[b].push_back(image[a]);
      }
    });
    for (std::size_t a = 0; a < image.size(); ++a) {
      std::vector<std::size_t> pre;
      for (std::size_t c : near[a]) pre.insert(pre.end(), fibers[c].begin(), fibers[c].end());
      std::sort(pre.begin(), pre.end());
      double constant = 1.0;
      if (line) {
        std::vector<double> xs;
        for (std::size_t p : pre) xs.push_back(dom.coords(p)[rule->offset()]);
        std::sort(xs.begin(), xs.end());
        auto count = [&](double rho) {
          std::size_t balls = 0;
          for (std::size_t i = 0; i < xs.size();) {
            const double reach = xs[i] + 2.0 * rho * (1.0 + kDistanceTol);
            ++balls;
            while (i < xs.size() && xs[i] <= reach) ++i;
          }
          return balls;
        };
        constant = ds_window_constant(count, 0.5 * (xs.back() - xs.front()), r);
      } else {
        auto count = [&](double rho) {
          std::vector<char> done(pre.size(), 0);
          std::size_t balls = 0;
          for (std::size_t i = 0; i < pre.size(); ++i) {
            if (done[i]) continue;
            ++balls;
            for (std::size_t j = i; j < pre.size(); ++j)
              if (!done[j] && within(dom.d(pre[i], pre[j]), rho)) done[j] = 1;
          }
          return balls;
        };
        constant = ds_window_constant(count, set_diameter(dom, pre).value, r);
      }
      if (constant > out.constant) {
        out.constant = constant;
        out.scale = r;
        out.center = cod.id(image[a]);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Specs

SampledMap build_map(const MapSpec& s, SpacePtr domain) {
  const std::string& k = s.kind;
  if (k == "identity") return identity_map(domain);
  if (k == "constant") return constant_map(domain);
  if (k == "coordinates") return coordinate_projection(domain, s.slots);
  if (k == "direction") return direction_projection(domain, s.direction);
  if (k == "line") return line_projection(domain, s.direction);
  if (k == "frame") {
    auto rows = orthonormal_complement(s.direction);
    rows.push_back(s.direction);
    double norm = 0.0;
    for (double c : rows.back()) norm += c * c;
    for (double& c : rows.back()) c /= std::sqrt(norm);
    return linear_map(domain, rows, "frame");
  }
  if (k == "linear") return linear_map(domain, s.rows, "linear");
  if (k == "tree_root") return tree_root_map(domain, s.root);
  if (k == "abs_fold") return abs_fold_map(domain);
  if (k == "cantor_coding") return cantor_coding_map(domain, s.depth).map;
  throw std::domain_error("unknown map kind '" + k + "'");
}

MapSpec map_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw std::domain_error("map spec must be an object with a string 'kind'");
  MapSpec s;
  try {
    s.kind = j["kind"].get<std::string>();
    if (j.contains("slots")) s.slots = j["slots"].get<std::vector<std::size_t>>();
    if (j.contains("direction")) s.direction = j["direction"].get<std::vector<double>>();
    if (j.contains("rows")) s.rows = j["rows"].get<std::vector<std::vector<double>>>();
    s.root = j.value("root", s.root);
    s.depth = j.value("depth", s.depth);
  } catch (const nlohmann::json::exception& e) {
    throw std::domain_error(std::string("malformed map spec: ") + e.what());
  }
  return s;
}

nlohmann::json to_json(const MapSpec& s) {
  nlohmann::json j{{"kind", s.kind}};
  if (!s.slots.empty()) j["slots"] = s.slots;
  if (!s.direction.empty()) j["direction"] = s.direction;
  if (!s.rows.empty()) j["rows"] = s.rows;
  if (s.kind == "tree_root") j["root"] = s.root;
  if (s.kind == "cantor_coding") j["depth"] = s.depth;
  return j;
}

}  // namespace lipdim
