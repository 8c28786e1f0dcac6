#include "lipdim/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lipdim {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::Scaled: return "scaled";
    case MetricKind::Snowflake: return "snowflake";
    case MetricKind::Koranyi: return "koranyi";
    case MetricKind::UltrametricWords: return "ultrametric_words";
    case MetricKind::TreePath: return "tree_path";
    case MetricKind::ProductSup: return "product_sup";
    case MetricKind::ExplicitMatrix: return "explicit_matrix";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// TreeData

TreeData::TreeData(std::vector<long> parent, std::vector<double> edge_length)
    : parent_(std::move(parent)), edge_length_(std::move(edge_length)) {
  const std::size_t n = parent_.size();
  if (n == 0) throw std::domain_error("tree must have at least one vertex");
  if (edge_length_.size() != n) throw std::domain_error("tree edge length count mismatch");

  std::vector<std::vector<std::size_t>> children(n);
  bool have_root = false;
  for (std::size_t v = 0; v < n; ++v) {
    if (parent_[v] < 0) {
      if (have_root) throw std::domain_error("tree has more than one root");
      have_root = true;
      root_ = v;
      continue;
    }
    if (static_cast<std::size_t>(parent_[v]) >= n)
      throw std::domain_error("tree parent index out of range");
    if (!(edge_length_[v] > 0.0) || !std::isfinite(edge_length_[v]))
      throw std::domain_error("tree edge lengths must be positive and finite");
    children[static_cast<std::size_t>(parent_[v])].push_back(v);
  }
  if (!have_root) throw std::domain_error("tree has no root");

  depth_.assign(n, 0);
  weighted_depth_.assign(n, 0.0);
  std::vector<std::size_t> order{root_};
  order.reserve(n);
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (std::size_t c : children[order[k]]) {
      depth_[c] = depth_[order[k]] + 1;
      weighted_depth_[c] = weighted_depth_[order[k]] + edge_length_[c];
      order.push_back(c);
    }
  }
  if (order.size() != n) throw std::domain_error("tree parent array contains a cycle");

  std::size_t levels = 1;
  while ((std::size_t{1} << levels) < n) ++levels;
  up_.assign(levels, std::vector<std::size_t>(n));
  for (std::size_t v = 0; v < n; ++v)
    up_[0][v] = parent_[v] < 0 ? v : static_cast<std::size_t>(parent_[v]);
  for (std::size_t l = 1; l < levels; ++l)
    for (std::size_t v = 0; v < n; ++v) up_[l][v] = up_[l - 1][up_[l - 1][v]];
}

std::size_t TreeData::lca(std::size_t a, std::size_t b) const {
  if (depth_[a] < depth_[b]) std::swap(a, b);
  std::size_t diff = depth_[a] - depth_[b];
  for (std::size_t l = 0; diff != 0; ++l, diff >>= 1)
    if (diff & 1U) a = up_[l][a];
  if (a == b) return a;
  for (std::size_t l = up_.size(); l-- > 0;) {
    if (up_[l][a] != up_[l][b]) {
      a = up_[l][a];
      b = up_[l][b];
    }
  }
  return up_[0][a];
}

double TreeData::distance(std::size_t a, std::size_t b) const {
  if (a == b) return 0.0;
  const std::size_t c = lca(a, b);
  return (weighted_depth_[a] - weighted_depth_[c]) + (weighted_depth_[b] - weighted_depth_[c]);
}

// ---------------------------------------------------------------------------
// Heisenberg helpers

HeisenbergPoint heisenberg_multiply(const HeisenbergPoint& a, const HeisenbergPoint& b) {
  // Im(z conj z') = y x' - x y'
  const double im = a.y * b.x - a.x * b.y;
  return {a.x + b.x, a.y + b.y, a.t + b.t - 0.5 * im};
}

HeisenbergPoint heisenberg_inverse(const HeisenbergPoint& a) { return {-a.x, -a.y, -a.t}; }

double koranyi_norm(const HeisenbergPoint& p) {
  const double z2 = p.x * p.x + p.y * p.y;
  return std::sqrt(std::sqrt(z2 * z2 + 16.0 * p.t * p.t));
}

// ---------------------------------------------------------------------------
// MetricRule

double MetricRule::operator()(const double* a, const double* b) const {
  switch (kind_) {
    case MetricKind::Euclidean: {
      double s = 0.0;
      for (std::size_t k = offset_; k < offset_ + width_; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
      }
      return std::sqrt(s);
    }
    case MetricKind::Scaled:
      return parameter_ * (*left_)(a, b);
    case MetricKind::Snowflake:
      return std::pow((*left_)(a, b), parameter_);
    case MetricKind::Koranyi: {
      const double* p = a + offset_;
      const double* q = b + offset_;
      const double dx = p[0] - q[0];
      const double dy = p[1] - q[1];
      // vertical part of q^{-1} p
      const double v = (p[2] - q[2]) + 0.5 * (p[0] * q[1] - q[0] * p[1]);
      const double z2 = dx * dx + dy * dy;
      return std::sqrt(std::sqrt(z2 * z2 + 16.0 * v * v));
    }
    case MetricKind::UltrametricWords: {
      for (std::size_t k = 0; k < width_; ++k)
        if (a[offset_ + k] != b[offset_ + k]) return std::ldexp(1.0, -static_cast<int>(k + 1));
      return 0.0;
    }
    case MetricKind::TreePath:
      return tree_->distance(static_cast<std::size_t>(a[offset_]),
                             static_cast<std::size_t>(b[offset_]));
    case MetricKind::ProductSup:
      return std::max((*left_)(a, b), (*right_)(a, b));
    case MetricKind::ExplicitMatrix:
      return matrix_->at(static_cast<std::size_t>(a[offset_]),
                         static_cast<std::size_t>(b[offset_]));
  }
  return 0.0;
}

bool MetricRule::has_ambient_coordinates() const {
  switch (kind_) {
    case MetricKind::Euclidean:
    case MetricKind::Koranyi:
      return true;
    case MetricKind::Scaled:
    case MetricKind::Snowflake:
      return left_->has_ambient_coordinates();
    case MetricKind::ProductSup:
      return left_->has_ambient_coordinates() && right_->has_ambient_coordinates();
    default:
      return false;
  }
}

std::optional<std::vector<double>> MetricRule::search_box(
    double r, std::span<const double> lo, std::span<const double> hi) const {
  switch (kind_) {
    case MetricKind::Euclidean:
      return std::vector<double>(width_, r);
    case MetricKind::Scaled:
      return left_->search_box(r / parameter_, lo, hi);
    case MetricKind::Snowflake:
      return left_->search_box(std::pow(r, 1.0 / parameter_), lo, hi);
    case MetricKind::UltrametricWords: {
      // d ≤ r forces the first m letters to agree; later letters are free.
      std::vector<double> box(width_, std::numeric_limits<double>::infinity());
      for (std::size_t k = 0; k < width_ && std::ldexp(1.0, -static_cast<int>(k + 1)) > r; ++k) box[k] = 0.5;
      return box;
    }
    case MetricKind::Koranyi: {
      const double mx = std::max(std::abs(lo[offset_]), std::abs(hi[offset_]));
      const double my = std::max(std::abs(lo[offset_ + 1]), std::abs(hi[offset_ + 1]));
      const double zmax = std::hypot(mx, my);
      // |Δt| ≤ r²/4 + ½|z_p||Δz| for any neighbour within Korányi distance r
      return std::vector<double>{r, r, 0.25 * r * r + 0.5 * zmax * r};
    }
    case MetricKind::ProductSup: {
      auto l = left_->search_box(r, lo, hi);
      auto rr = right_->search_box(r, lo, hi);
      if (!l || !rr) return std::nullopt;
      l->insert(l->end(), rr->begin(), rr->end());
      return l;
    }
    default:
      return std::nullopt;
  }
}

RulePtr MetricRule::shifted(std::size_t delta) const {
  auto copy = std::shared_ptr<MetricRule>(new MetricRule(*this));
  copy->offset_ += delta;
  if (left_) copy->left_ = left_->shifted(delta);
  if (right_) copy->right_ = right_->shifted(delta);
  return copy;
}

RulePtr euclidean(std::size_t dim, std::size_t offset) {
  auto r = std::shared_ptr<MetricRule>(new MetricRule());
  r->kind_ = MetricKind::Euclidean;
  r->offset_ = offset;
  r->width_ = dim;
  return r;
}

RulePtr scaled(double lambda, RulePtr base) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::domain_error("scale factor must be positive and finite");
  auto r = std::shared_ptr<MetricRule>(new MetricRule());
  r->kind_ = MetricKind::Scaled;
  r->offset_ = base->offset();
  r->width_ = base->width();
  r->parameter_ = lambda;
  r->left_ = std::move(base);
  return r;
}

RulePtr snowflake(double alpha, RulePtr base) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("snowflake exponent must lie in (0, 1]");
  auto r = std::shared_ptr<MetricRule>(new MetricRule());
  r->kind_ = MetricKind::Snowflake;
  r->offset_ = base->offset();
  r->width_ = base->width();
  r->parameter_ = alpha;
  r->left_ = std::move(base);
  return r;
}

RulePtr koranyi(std::size_t offset) {
  auto r = std::shared_ptr<MetricRule>(new MetricRule());
  r->kind_ = MetricKind::Koranyi;
  r->offset_ = offset;
  r->width_ = 3;
  return r;
}

RulePtr ultrametric_words(std::size_t depth, std::size_t offset) {
  auto r = std::shared_ptr<MetricRule>(new MetricRule());
  r->kind_ = MetricKind::UltrametricWords;
  r->offset_ = offset;
  r->width_ = depth;
  return r;
}

RulePtr tree_path(std::shared_ptr<const TreeData> tree, std::size_t offset) {
  auto r = std::shared_ptr<MetricRule>(new MetricRule());
  r->kind_ = MetricKind::TreePath;
  r->offset_ = offset;
  r->width_ = 1;
  r->tree_ = std::move(tree);
  return r;
}

RulePtr product_sup(RulePtr left, RulePtr right) {
  auto r = std::shared_ptr<MetricRule>(new MetricRule());
  r->kind_ = MetricKind::ProductSup;
  r->offset_ = left->offset();
  r->width_ = left->width() + right->width();
  const std::size_t shift = left->offset() + left->width();
  r->right_ = right->shifted(shift - right->offset());
  r->left_ = std::move(left);
  return r;
}

RulePtr explicit_matrix(std::shared_ptr<const DistanceMatrix> matrix, std::size_t offset) {
  auto r = std::shared_ptr<MetricRule>(new MetricRule());
  r->kind_ = MetricKind::ExplicitMatrix;
  r->offset_ = offset;
  r->width_ = 1;
  r->matrix_ = std::move(matrix);
  return r;
}

RulePtr rescale_rule(const RulePtr& rule, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::domain_error("rescale factor must be positive and finite");
  switch (rule->kind()) {
    case MetricKind::Snowflake:
      return snowflake(rule->parameter(),
                       rescale_rule(rule->left(), std::pow(lambda, 1.0 / rule->parameter())));
    case MetricKind::Scaled: {
      const double combined = rule->parameter() * lambda;
      if (combined == 1.0) return rule->left();
      return scaled(combined, rule->left());
    }
    case MetricKind::ProductSup: {
      // Rebuild with both factors rescaled, keeping the original slot layout.
      auto l = rescale_rule(rule->left(), lambda);
      auto r = rescale_rule(rule->right(), lambda);
      return product_sup(l, r->shifted(0));
    }
    default:
      return scaled(lambda, rule);
  }
}

}  // namespace lipdim
