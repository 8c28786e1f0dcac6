#include "lipdim/generators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <random>

namespace lipdim {

std::size_t point_budget() {
  if (const char* env = std::getenv("LIPDIM_BUDGET")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 10'000'000;
}

std::string to_string(Sampling s) { return s == Sampling::Corners ? "corners" : "centers"; }

std::string to_string(TreeShape s) {
  switch (s) {
    case TreeShape::Binary: return "binary";
    case TreeShape::Caterpillar: return "caterpillar";
    case TreeShape::Random: return "random";
    case TreeShape::Path: return "path";
    case TreeShape::Star: return "star";
  }
  return "unknown";
}

namespace {

void check_budget(double count, const std::string& what) {
  if (count > static_cast<double>(point_budget()))
    throw BudgetError(what + " needs " + std::to_string(static_cast<long long>(count)) +
                      " points, over the budget of " + std::to_string(point_budget()));
}

std::vector<PointId> sequential_ids(std::size_t n) {
  std::vector<PointId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<PointId>(i);
  return ids;
}

FiniteMetricSpace euclidean_space(std::vector<double> coords, std::size_t dim, double resolution) {
  const std::size_t n = dim == 0 ? 0 : coords.size() / dim;
  return FiniteMetricSpace(sequential_ids(n), std::move(coords), dim, euclidean(dim), resolution);
}

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t v = 1;
  for (int i = 0; i < e; ++i) v *= base;
  return v;
}

// Uniform double in [0,1) from 53 random bits; identical on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

// ---------------------------------------------------------------------------
// Self-similar sets

std::vector<std::array<std::int64_t, 2>> carpet_cells(int p, int gen) {
  if (p < 3 || p % 2 == 0) throw std::domain_error("carpet needs an odd p >= 3");
  if (gen < 0) throw std::domain_error("carpet generation must be non-negative");
  check_budget(std::pow(static_cast<double>(p) * p - 1.0, gen), "carpet");
  const std::int64_t mid = (p - 1) / 2;
  std::vector<std::array<std::int64_t, 2>> cells{{0, 0}};
  for (int g = 0; g < gen; ++g) {
    std::vector<std::array<std::int64_t, 2>> next;
    next.reserve(cells.size() * static_cast<std::size_t>(p * p - 1));
    for (const auto& c : cells)
      for (std::int64_t a = 0; a < p; ++a)
        for (std::int64_t b = 0; b < p; ++b)
          if (a != mid || b != mid) next.push_back({c[0] * p + a, c[1] * p + b});
    cells = std::move(next);
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

FiniteMetricSpace carpet(int p, int gen, Sampling sampling) {
  const auto cells = carpet_cells(p, gen);
  const std::int64_t side = ipow(p, gen);
  const double scale = static_cast<double>(side);
  std::vector<double> coords;
  if (sampling == Sampling::Centers) {
    coords.reserve(cells.size() * 2);
    for (const auto& c : cells) {
      coords.push_back((static_cast<double>(c[0]) + 0.5) / scale);
      coords.push_back((static_cast<double>(c[1]) + 0.5) / scale);
    }
  } else {
    const std::int64_t w = side + 1;
    check_budget(static_cast<double>(w) * static_cast<double>(w), "carpet corner bitmap");
    std::vector<char> hit(static_cast<std::size_t>(w * w), 0);
    for (const auto& c : cells)
      for (std::int64_t a = 0; a < 2; ++a)
        for (std::int64_t b = 0; b < 2; ++b) hit[static_cast<std::size_t>((c[0] + a) * w + c[1] + b)] = 1;
    for (std::int64_t i = 0; i < w; ++i)
      for (std::int64_t j = 0; j < w; ++j)
        if (hit[static_cast<std::size_t>(i * w + j)]) {
          coords.push_back(static_cast<double>(i) / scale);
          coords.push_back(static_cast<double>(j) / scale);
        }
  }
  return euclidean_space(std::move(coords), 2, 1.0 / scale);
}

FiniteMetricSpace gasket(int gen, Sampling sampling) {
  if (gen < 0) throw std::domain_error("gasket generation must be non-negative");
  check_budget(std::pow(3.0, gen + 1), "gasket");
  // Upward lattice triangles (a, b) with a + b < 2^gen are kept iff a & b == 0.
  const std::int64_t side = ipow(2, gen);
  const double scale = static_cast<double>(side);
  const double h = std::sqrt(3.0) / 2.0;
  std::vector<double> coords;
  auto emit = [&](double a, double b) {
    coords.push_back((a + 0.5 * b) / scale);
    coords.push_back(b * h / scale);
  };
  if (sampling == Sampling::Centers) {
    for (std::int64_t a = 0; a < side; ++a)
      for (std::int64_t b = 0; a + b < side; ++b)
        if ((a & b) == 0) emit(static_cast<double>(a) + 1.0 / 3.0, static_cast<double>(b) + 1.0 / 3.0);
  } else {
    // A lattice vertex belongs to a kept triangle iff one of the (up to three)
    // upward triangles having it as a corner is kept.
    auto kept = [&](std::int64_t a, std::int64_t b) {
      return a >= 0 && b >= 0 && a + b < side && (a & b) == 0;
    };
    for (std::int64_t a = 0; a <= side; ++a)
      for (std::int64_t b = 0; a + b <= side; ++b)
        if (kept(a, b) || kept(a - 1, b) || kept(a, b - 1))
          emit(static_cast<double>(a), static_cast<double>(b));
  }
  return euclidean_space(std::move(coords), 2, 1.0 / scale);
}

FiniteMetricSpace koch(int gen) {
  if (gen < 0) throw std::domain_error("koch generation must be non-negative");
  check_budget(std::pow(4.0, gen) + 1.0, "koch");
  using C = std::complex<double>;
  const C turn = std::polar(1.0, std::acos(-1.0) / 3.0);
  std::vector<C> pts{C(0, 0), C(1, 0)};
  for (int g = 0; g < gen; ++g) {
    std::vector<C> next;
    next.reserve(pts.size() * 4);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const C a = pts[i], b = pts[i + 1];
      const C third = (b - a) / 3.0;
      next.push_back(a);
      next.push_back(a + third);
      next.push_back(a + third + third * turn);
      next.push_back(a + 2.0 * third);
    }
    next.push_back(pts.back());
    pts = std::move(next);
  }
  std::vector<double> coords;
  coords.reserve(pts.size() * 2);
  for (const C& z : pts) {
    coords.push_back(z.real());
    coords.push_back(z.imag());
  }
  return euclidean_space(std::move(coords), 2, std::pow(3.0, -gen));
}

FiniteMetricSpace snowflake_space(const FiniteMetricSpace& base, double alpha) {
  return base.with_rule(snowflake(alpha, base.rule()), std::pow(base.resolution(), alpha));
}

// ---------------------------------------------------------------------------
// Heisenberg group

FiniteMetricSpace heisenberg_net(double radius, double eps) {
  if (!(radius > 0.0) || !(eps > 0.0)) throw std::domain_error("heisenberg net needs R > 0 and eps > 0");
  const auto m = static_cast<std::int64_t>(std::floor(radius / eps + 1e-9));
  const double eps2 = eps * eps;
  const auto kt = static_cast<std::int64_t>(std::floor(radius * radius / (4.0 * eps2) + 1e-9));
  check_budget(std::pow(2.0 * m + 1, 2) * (2.0 * kt + 1) * 0.6, "heisenberg net");

  std::vector<double> coords;
  std::vector<std::array<std::int64_t, 3>> lattice;
  for (std::int64_t i = -m; i <= m; ++i)
    for (std::int64_t j = -m; j <= m; ++j)
      for (std::int64_t k = -kt; k <= kt; ++k) {
        const HeisenbergPoint p{static_cast<double>(i) * eps, static_cast<double>(j) * eps,
                                static_cast<double>(k) * eps2};
        if (koranyi_norm(p) > radius * (1.0 + 1e-12)) continue;
        coords.insert(coords.end(), {p.x, p.y, p.t});
        lattice.push_back({i, j, k});
      }
  check_budget(static_cast<double>(lattice.size()), "heisenberg net");
  const std::size_t n = lattice.size();
  FiniteMetricSpace probe(sequential_ids(n), coords, 3, koranyi());

  // Exact largest nearest-neighbour distance. A neighbour within 2·eps has
  // |di|,|dj| ≤ 2 and a vertical term |v| ≤ eps², so its t-index lies within
  // 2 of the one cancelling the horizontal cross term.
  const std::int64_t span_ij = 2 * m + 1, span_k = 2 * kt + 1;
  constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(static_cast<std::size_t>(span_ij * span_ij * span_k), kAbsent);
  auto slot = [&](std::int64_t i, std::int64_t j, std::int64_t k) {
    return static_cast<std::size_t>(((i + m) * span_ij + (j + m)) * span_k + (k + kt));
  };
  for (std::size_t p = 0; p < n; ++p) index[slot(lattice[p][0], lattice[p][1], lattice[p][2])] = p;
  double worst = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const auto [pi, pj, pk] = lattice[p];
    double nn = std::numeric_limits<double>::infinity();
    for (std::int64_t i = pi - 2; i <= pi + 2; ++i)
      for (std::int64_t j = pj - 2; j <= pj + 2; ++j) {
        if (std::abs(i) > m || std::abs(j) > m) continue;
        const double cross = 0.5 * static_cast<double>(pi * j - i * pj);  // in units of eps²
        const auto kc = static_cast<std::int64_t>(std::llround(static_cast<double>(pk) + cross));
        for (std::int64_t k = kc - 3; k <= kc + 3; ++k) {
          if (std::abs(k) > kt) continue;
          const std::size_t q = index[slot(i, j, k)];
          if (q == kAbsent || q == p) continue;
          nn = std::min(nn, probe.d(p, q));
        }
      }
    if (!(nn <= 2.0 * eps)) {
      for (std::size_t q = 0; q < n; ++q)
        if (q != p) nn = std::min(nn, probe.d(p, q));
    }
    if (std::isfinite(nn)) worst = std::max(worst, nn);
  }
  return FiniteMetricSpace(sequential_ids(n), std::move(coords), 3, koranyi(), worst);
}

// ---------------------------------------------------------------------------
// Ultrametric words and trees

FiniteMetricSpace word_cantor(int alphabet, int depth) {
  if (alphabet < 1 || depth < 1) throw std::domain_error("word space needs M >= 1 and D >= 1");
  const double count = std::pow(static_cast<double>(alphabet), depth);
  check_budget(count, "word space");
  const auto n = static_cast<std::size_t>(count);
  const auto d = static_cast<std::size_t>(depth);
  std::vector<double> coords(n * d);
  for (std::size_t w = 0; w < n; ++w) {
    std::size_t rest = w;
    for (std::size_t i = d; i-- > 0;) {
      coords[w * d + i] = static_cast<double>(rest % static_cast<std::size_t>(alphabet) + 1);
      rest /= static_cast<std::size_t>(alphabet);
    }
  }
  return FiniteMetricSpace(sequential_ids(n), std::move(coords), d, ultrametric_words(d),
                           alphabet > 1 ? std::ldexp(1.0, -depth) : 0.0);
}

FiniteMetricSpace tree(TreeShape shape, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::domain_error("tree needs at least one node");
  check_budget(static_cast<double>(n), "tree");
  std::vector<long> parent(n, -1);
  std::vector<double> length(n, 0.0);
  std::mt19937_64 rng(seed);
  const std::size_t spine = (n + 1) / 2;
  for (std::size_t i = 1; i < n; ++i) {
    length[i] = 1.0;
    switch (shape) {
      case TreeShape::Binary: parent[i] = static_cast<long>((i - 1) / 2); break;
      case TreeShape::Path: parent[i] = static_cast<long>(i - 1); break;
      case TreeShape::Star: parent[i] = 0; break;
      case TreeShape::Caterpillar:
        parent[i] = static_cast<long>(i < spine ? i - 1 : i - spine);
        break;
      case TreeShape::Random:
        parent[i] = static_cast<long>(rng() % i);
        length[i] = 0.5 + unit(rng);
        break;
    }
  }
  // Exact nearest-neighbour distance: the shortest incident edge.
  std::vector<double> shortest(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 1; i < n; ++i) {
    shortest[i] = std::min(shortest[i], length[i]);
    auto& p = shortest[static_cast<std::size_t>(parent[i])];
    p = std::min(p, length[i]);
  }
  double res = 0.0;
  if (n > 1)
    for (double s : shortest) res = std::max(res, s);
  auto data = std::make_shared<const TreeData>(std::move(parent), std::move(length));
  std::vector<double> coords(n);
  for (std::size_t i = 0; i < n; ++i) coords[i] = static_cast<double>(i);
  return FiniteMetricSpace(sequential_ids(n), std::move(coords), 1, tree_path(data), res);
}

// ---------------------------------------------------------------------------
// Subsets of the line and simple clouds

FiniteMetricSpace interval_net(std::size_t n) {
  if (n == 0) throw std::domain_error("interval net needs n >= 1");
  check_budget(static_cast<double>(n) + 1.0, "interval net");
  std::vector<double> coords(n + 1);
  for (std::size_t i = 0; i <= n; ++i) coords[i] = static_cast<double>(i) / static_cast<double>(n);
  return euclidean_space(std::move(coords), 1, 1.0 / static_cast<double>(n));
}

FiniteMetricSpace middle_cantor(double ratio, int depth) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::domain_error("cantor ratio must lie in (0, 1)");
  if (depth < 0) throw std::domain_error("cantor depth must be non-negative");
  check_budget(std::pow(2.0, depth + 1), "middle cantor set");
  const double keep = (1.0 - ratio) / 2.0;
  std::vector<std::pair<double, double>> iv{{0.0, 1.0}};
  for (int g = 0; g < depth; ++g) {
    std::vector<std::pair<double, double>> next;
    next.reserve(iv.size() * 2);
    for (auto [a, b] : iv) {
      const double len = (b - a) * keep;
      next.push_back({a, a + len});
      next.push_back({b - len, b});
    }
    iv = std::move(next);
  }
  std::vector<double> coords;
  coords.reserve(iv.size() * 2);
  for (auto [a, b] : iv) {
    coords.push_back(a);
    coords.push_back(b);
  }
  return euclidean_space(std::move(coords), 1, std::pow(keep, depth));
}

FiniteMetricSpace harmonic(std::size_t n) {
  if (n == 0) throw std::domain_error("harmonic set needs N >= 1");
  check_budget(static_cast<double>(n) + 1.0, "harmonic set");
  std::vector<double> coords{0.0};
  for (std::size_t k = n; k >= 1; --k) coords.push_back(1.0 / static_cast<double>(k));
  return euclidean_space(std::move(coords), 1, 1.0 / static_cast<double>(n));
}

FiniteMetricSpace strip(std::size_t sheets_k, std::size_t n) {
  std::vector<double> sheets;
  for (std::size_t s = 0; s <= sheets_k; ++s) sheets.push_back(2.0 * static_cast<double>(s));
  FiniteMetricSpace levels = euclidean_space(std::move(sheets), 1, 2.0);
  FiniteMetricSpace out = product(interval_net(n), levels);
  return out.with_rule(out.rule(), 1.0 / static_cast<double>(n));
}

FiniteMetricSpace random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::domain_error("random cloud needs dim >= 1");
  check_budget(static_cast<double>(n), "random cloud");
  std::mt19937_64 rng(seed);
  std::vector<double> coords(n * dim);
  for (double& c : coords) c = unit(rng);
  return euclidean_space(std::move(coords), dim, 0.0);
}

FiniteMetricSpace point_cloud(std::vector<double> coords, std::size_t dim, double resolution) {
  if (dim == 0 || coords.size() % dim != 0) throw std::domain_error("coordinate buffer does not match dim");
  return euclidean_space(std::move(coords), dim, resolution);
}

FiniteMetricSpace product(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  for (const FiniteMetricSpace* f : {&x, &y})
    if (f->rule()->offset() != 0 || f->rule()->width() != f->record_width())
      throw std::domain_error("product factors must use their whole coordinate record");
  check_budget(static_cast<double>(x.size()) * static_cast<double>(y.size()), "product");
  const std::size_t wx = x.record_width(), wy = y.record_width();
  std::vector<PointId> ids;
  std::vector<double> coords;
  ids.reserve(x.size() * y.size());
  coords.reserve(x.size() * y.size() * (wx + wy));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) {
      ids.push_back(static_cast<PointId>(i * y.size() + j));
      auto a = x.coords(i);
      auto b = y.coords(j);
      coords.insert(coords.end(), a.begin(), a.end());
      coords.insert(coords.end(), b.begin(), b.end());
    }
  const double res = std::max(x.resolution(), y.resolution());
  return FiniteMetricSpace(std::move(ids), std::move(coords), wx + wy,
                           product_sup(x.rule(), y.rule()), res);
}

// ---------------------------------------------------------------------------
// Specs

FiniteMetricSpace generate(const SpaceSpec& s) {
  auto derive_gen = [&](double base) {
    if (s.gen > 0 || !(s.resolution > 0.0)) return s.gen;
    return static_cast<int>(std::ceil(std::log(1.0 / s.resolution) / std::log(base) - 1e-9));
  };
  auto derive_n = [&](std::size_t fallback) {
    if (s.n > 0) return s.n;
    if (s.resolution > 0.0) return static_cast<std::size_t>(std::ceil(1.0 / s.resolution - 1e-9));
    return fallback;
  };
  const std::string& k = s.kind;
  if (k == "carpet") return carpet(s.p, derive_gen(s.p), s.sampling);
  if (k == "gasket") return gasket(derive_gen(2.0), s.sampling);
  if (k == "koch") return koch(derive_gen(3.0));
  if (k == "heisenberg") return heisenberg_net(s.radius, s.eps > 0.0 ? s.eps : (s.resolution > 0.0 ? s.resolution : 1.0 / 16.0));
  if (k == "words") {
    int depth = s.depth;
    if (depth == 0) depth = s.resolution > 0.0 ? static_cast<int>(std::ceil(std::log2(1.0 / s.resolution) - 1e-9)) : 3;
    return word_cantor(s.alphabet, depth);
  }
  if (k == "tree") return tree(s.shape, derive_n(100), s.seed);
  if (k == "interval") return interval_net(derive_n(100));
  if (k == "cantor") {
    int depth = s.depth;
    if (depth == 0 && s.resolution > 0.0)
      depth = static_cast<int>(std::ceil(std::log(s.resolution) / std::log((1.0 - s.ratio) / 2.0) - 1e-9));
    return middle_cantor(s.ratio, depth);
  }
  if (k == "harmonic") return harmonic(derive_n(100));
  if (k == "strip") return strip(s.sheets, derive_n(100));
  if (k == "random") return random_cloud(derive_n(500), s.dim, s.seed);
  if (k == "snowflake") {
    if (s.factors.size() != 1) throw std::domain_error("snowflake spec needs exactly one base");
    return snowflake_space(generate(s.factors[0]), s.alpha);
  }
  if (k == "product") {
    if (s.factors.size() != 2) throw std::domain_error("product spec needs exactly two factors");
    return product(generate(s.factors[0]), generate(s.factors[1]));
  }
  throw std::domain_error("unknown space kind '" + k + "'");
}

namespace {

Sampling parse_sampling(const std::string& v) {
  if (v == "corners") return Sampling::Corners;
  if (v == "centers") return Sampling::Centers;
  throw std::domain_error("sampling must be corners or centers, got '" + v + "'");
}

TreeShape parse_shape(const std::string& v) {
  for (TreeShape s : {TreeShape::Binary, TreeShape::Caterpillar, TreeShape::Random, TreeShape::Path,
                      TreeShape::Star})
    if (to_string(s) == v) return s;
  throw std::domain_error("unknown tree shape '" + v + "'");
}

}  // namespace

SpaceSpec space_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw std::domain_error("space spec must be an object with a string 'kind'");
  SpaceSpec s;
  try {
    s.kind = j["kind"].get<std::string>();
    s.p = j.value("p", s.p);
    s.gen = j.value("gen", s.gen);
    if (j.contains("sampling")) s.sampling = parse_sampling(j["sampling"].get<std::string>());
    s.radius = j.value("radius", s.radius);
    s.eps = j.value("eps", s.eps);
    s.alphabet = j.value("alphabet", s.alphabet);
    s.depth = j.value("depth", s.depth);
    if (j.contains("shape")) s.shape = parse_shape(j["shape"].get<std::string>());
    s.n = j.value("n", s.n);
    s.dim = j.value("dim", s.dim);
    s.sheets = j.value("sheets", s.sheets);
    s.ratio = j.value("ratio", s.ratio);
    s.alpha = j.value("alpha", s.alpha);
    s.seed = j.value("seed", s.seed);
    s.resolution = j.value("resolution", s.resolution);
    if (j.contains("base")) s.factors.push_back(space_spec_from_json(j["base"]));
    if (j.contains("factors"))
      for (const auto& f : j["factors"]) s.factors.push_back(space_spec_from_json(f));
  } catch (const nlohmann::json::exception& e) {
    throw std::domain_error(std::string("malformed space spec: ") + e.what());
  }
  return s;
}

nlohmann::json to_json(const SpaceSpec& s) {
  nlohmann::json j{{"kind", s.kind}, {"seed", s.seed}, {"resolution", s.resolution}};
  const std::string& k = s.kind;
  if (k == "carpet") j.update({{"p", s.p}, {"gen", s.gen}, {"sampling", to_string(s.sampling)}});
  if (k == "gasket") j.update({{"gen", s.gen}, {"sampling", to_string(s.sampling)}});
  if (k == "koch") j["gen"] = s.gen;
  if (k == "heisenberg") j.update({{"radius", s.radius}, {"eps", s.eps}});
  if (k == "words") j.update({{"alphabet", s.alphabet}, {"depth", s.depth}});
  if (k == "tree") j.update({{"shape", to_string(s.shape)}, {"n", s.n}});
  if (k == "interval" || k == "harmonic") j["n"] = s.n;
  if (k == "cantor") j.update({{"ratio", s.ratio}, {"depth", s.depth}});
  if (k == "strip") j.update({{"sheets", s.sheets}, {"n", s.n}});
  if (k == "random") j.update({{"n", s.n}, {"dim", s.dim}});
  if (k == "snowflake") {
    j["alpha"] = s.alpha;
    if (!s.factors.empty()) j["base"] = to_json(s.factors[0]);
  }
  if (k == "product") {
    j["factors"] = nlohmann::json::array();
    for (const auto& f : s.factors) j["factors"].push_back(to_json(f));
  }
  return j;
}

}  // namespace lipdim
