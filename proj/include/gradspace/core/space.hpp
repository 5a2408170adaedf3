#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gradspace/config.hpp"
#include "gradspace/engine/eigh.hpp"
#include "gradspace/linalg.hpp"

namespace gradspace {

enum class SpaceKind { euclidean_grid, metric_points, graph_edges, symmetric_matrix, toy_complex };

inline const char* to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::euclidean_grid: return "euclidean-grid";
    case SpaceKind::metric_points: return "metric-points";
    case SpaceKind::graph_edges: return "graph-edges";
    case SpaceKind::symmetric_matrix: return "symmetric-matrix";
    case SpaceKind::toy_complex: return "toy-complex";
  }
  return "unknown";
}

/// Side length n of an n x n matrix stored row-major in `dimension` coordinates.
inline std::size_t matrix_side(std::size_t dimension) {
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(dimension))));
  require(n * n == dimension, ErrorKind::dimension, "matrix space dimension is not a perfect square");
  return n;
}

/// Norm on a finite coordinate space. Every variant has 1 < p < infinity so the
/// space is reflexive and strictly convex.
class NormSpec {
 public:
  /// (sum_b w_b |x_b|_2^p)^{1/p} over consecutive coordinate blocks x_b. With no
  /// block sizes every coordinate is its own block.
  struct WeightedLp {
    double p = 2.0;
    Vec weights;
    std::vector<std::size_t> blocks;
  };
  /// (sum_i sigma_i(A)^p)^{1/p} over the singular values of the n x n matrix.
  struct Schatten {
    double p = 2.0;
  };
  struct Euclidean {};

  NormSpec() : v_(Euclidean{}) {}

  static NormSpec euclidean() { return NormSpec(Euclidean{}); }
  static NormSpec schatten(double p) {
    check_p(p);
    return NormSpec(Schatten{p});
  }
  static NormSpec weighted_lp(double p, Vec weights, std::vector<std::size_t> blocks = {}) {
    check_p(p);
    for (double w : weights) {
      require(std::isfinite(w) && w > 0.0, ErrorKind::precondition, "norm weights must be strictly positive");
    }
    if (!blocks.empty()) {
      require_same_size(blocks.size(), weights.size(), "weighted-lp blocks vs weights");
      for (std::size_t b : blocks) require(b >= 1, ErrorKind::precondition, "norm block sizes must be >= 1");
    }
    return NormSpec(WeightedLp{p, std::move(weights), std::move(blocks)});
  }
  static NormSpec uniform_lp(double p, std::size_t dimension, double weight = 1.0) {
    return weighted_lp(p, Vec(dimension, weight));
  }

  bool is_euclidean() const { return std::holds_alternative<Euclidean>(v_); }
  bool is_schatten() const { return std::holds_alternative<Schatten>(v_); }
  bool is_weighted_lp() const { return std::holds_alternative<WeightedLp>(v_); }
  const WeightedLp& weighted() const { return std::get<WeightedLp>(v_); }

  double p() const {
    if (auto* w = std::get_if<WeightedLp>(&v_)) return w->p;
    if (auto* s = std::get_if<Schatten>(&v_)) return s->p;
    return 2.0;
  }

  /// True when the norm is a weighted l^p norm acting coordinate by coordinate
  /// (singleton blocks), which is what the inequality-type relations require.
  bool is_coordinatewise() const {
    if (is_euclidean()) return true;
    if (auto* w = std::get_if<WeightedLp>(&v_)) return w->blocks.empty();
    return false;
  }

  /// Weight for coordinate i of a coordinatewise norm.
  double coordinate_weight(std::size_t i) const {
    if (auto* w = std::get_if<WeightedLp>(&v_)) return w->weights.at(i);
    return 1.0;
  }

  std::size_t expected_dimension() const {
    if (auto* w = std::get_if<WeightedLp>(&v_)) {
      if (w->blocks.empty()) return w->weights.size();
      return std::accumulate(w->blocks.begin(), w->blocks.end(), std::size_t{0});
    }
    return 0;
  }

  std::string describe() const {
    if (is_euclidean()) return "euclidean";
    if (is_schatten()) return "schatten(p=" + std::to_string(p()) + ")";
    return "weighted-lp(p=" + std::to_string(p()) + ")";
  }

  /// ||x||^p (p = 2 for the Euclidean variant).
  double power(std::span<const double> x) const {
    if (is_euclidean()) return dot(x, x);
    if (auto* s = std::get_if<Schatten>(&v_)) {
      double sum = 0.0;
      for (double sigma : singular_values_of(x)) sum += std::pow(sigma, s->p);
      return sum;
    }
    const auto& w = std::get<WeightedLp>(v_);
    double sum = 0.0;
    for_each_block(w, x.size(), [&](std::size_t b, std::size_t off, std::size_t len) {
      double sq = 0.0;
      for (std::size_t i = off; i < off + len; ++i) sq += x[i] * x[i];
      sum += w.weights[b] * (len == 1 ? std::pow(std::abs(x[off]), w.p) : std::pow(sq, 0.5 * w.p));
    });
    return sum;
  }

  double norm(std::span<const double> x) const {
    const double pw = power(x);
    return p() == 2.0 ? std::sqrt(pw) : std::pow(pw, 1.0 / p());
  }

  /// Gradient of x -> ||x||^p (a subgradient where the norm is not smooth).
  Vec power_gradient(std::span<const double> x) const {
    Vec g(x.size(), 0.0);
    if (is_euclidean()) {
      for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i];
      return g;
    }
    if (auto* s = std::get_if<Schatten>(&v_)) return schatten_power_gradient(x, s->p);
    const auto& w = std::get<WeightedLp>(v_);
    for_each_block(w, x.size(), [&](std::size_t b, std::size_t off, std::size_t len) {
      double sq = 0.0;
      for (std::size_t i = off; i < off + len; ++i) sq += x[i] * x[i];
      if (sq == 0.0) return;
      const double factor = w.p * w.weights[b] * std::pow(sq, 0.5 * w.p - 1.0);
      for (std::size_t i = off; i < off + len; ++i) g[i] = factor * x[i];
    });
    return g;
  }

  /// Check the norm is admissible for a space of the given kind and dimension.
  void validate_for(SpaceKind kind, std::size_t dimension) const {
    if (is_schatten()) {
      require(kind == SpaceKind::symmetric_matrix, ErrorKind::precondition,
              "schatten norms are only valid on symmetric-matrix spaces");
      matrix_side(dimension);
    }
    if (is_weighted_lp()) {
      require(expected_dimension() == dimension, ErrorKind::dimension,
              "weighted-lp norm covers " + std::to_string(expected_dimension()) + " coordinates, space has " +
                  std::to_string(dimension));
    }
  }

 private:
  explicit NormSpec(std::variant<WeightedLp, Schatten, Euclidean> v) : v_(std::move(v)) {}

  static void check_p(double p) {
    require(std::isfinite(p) && p > 1.0, ErrorKind::precondition, "norm exponent must satisfy 1 < p < infinity");
  }

  template <typename Fn>
  static void for_each_block(const WeightedLp& w, std::size_t n, Fn&& fn) {
    if (w.blocks.empty()) {
      require_same_size(n, w.weights.size(), "weighted-lp norm");
      for (std::size_t i = 0; i < n; ++i) fn(i, i, 1);
      return;
    }
    std::size_t off = 0;
    for (std::size_t b = 0; b < w.blocks.size(); ++b) {
      fn(b, off, w.blocks[b]);
      off += w.blocks[b];
    }
    require_same_size(n, off, "weighted-lp norm blocks");
  }

  static DenseMatrix as_matrix(std::span<const double> x) {
    const std::size_t n = matrix_side(x.size());
    return DenseMatrix(n, n, Vec(x.begin(), x.end()));
  }

  static bool exactly_symmetric(const DenseMatrix& a) {
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = i + 1; j < a.cols(); ++j)
        if (a(i, j) != a(j, i)) return false;
    return true;
  }

  static Vec singular_values_of(std::span<const double> x) {
    const DenseMatrix a = as_matrix(x);
    if (exactly_symmetric(a)) {
      Vec ev = engine::jacobi_eigh(a).values;
      for (double& v : ev) v = std::abs(v);
      return ev;
    }
    return engine::singular_values(a);
  }

  static Vec schatten_power_gradient(std::span<const double> x, double p) {
    const DenseMatrix a = as_matrix(x);
    if (exactly_symmetric(a)) {
      const auto e = engine::jacobi_eigh(a);
      return e.apply_function([p](double l) { return l == 0.0 ? 0.0 : p * std::copysign(std::pow(std::abs(l), p - 1.0), l); })
          .data();
    }
    // d/dA tr (A^T A)^{p/2} = p A (A^T A)^{(p-2)/2}
    const auto e = engine::jacobi_eigh(a.transpose() * a);
    const double cutoff = 1e-30 * std::max(1.0, e.values.back());
    const DenseMatrix f = e.apply_function([&](double l) { return l <= cutoff ? 0.0 : p * std::pow(l, 0.5 * p - 1.0); });
    return (a * f).data();
  }

  std::variant<WeightedLp, Schatten, Euclidean> v_;
};

struct SpaceDescriptor {
  SpaceKind kind = SpaceKind::metric_points;
  std::size_t dimension = 1;
  NormSpec norm;

  SpaceDescriptor() = default;
  SpaceDescriptor(SpaceKind k, std::size_t dim, NormSpec nrm) : kind(k), dimension(dim), norm(std::move(nrm)) {
    require(dimension >= 1, ErrorKind::precondition, "space dimension must be >= 1");
    norm.validate_for(kind, dimension);
  }
};

/// A point of a finite coordinate space. Obstacles living in the ambient space
/// use the same carrier; only finiteness is enforced.
class Element {
 public:
  Element() = default;
  Element(SpaceDescriptor space, Vec coords) : space_(std::move(space)), coords_(std::move(coords)) {
    require_same_size(coords_.size(), space_.dimension, "Element coordinates");
    require(all_finite(coords_), ErrorKind::precondition, "Element coordinates must be finite");
  }
  static Element zero(const SpaceDescriptor& space) { return Element(space, Vec(space.dimension, 0.0)); }

  const SpaceDescriptor& space() const noexcept { return space_; }
  const Vec& coords() const noexcept { return coords_; }
  std::size_t size() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double norm() const { return space_.norm.norm(coords_); }

 private:
  SpaceDescriptor space_;
  Vec coords_;
};

struct SolveReport {
  Element minimizer;
  Element minimal_gradient;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double feasibility_residual = 0.0;
  /// First-order stationarity measure of the minimizer (method dependent, 0 when exact).
  double stationarity = 0.0;
  std::string method;
};

}  // namespace gradspace
