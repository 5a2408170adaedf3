#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "gradspace/linalg.hpp"

namespace gradspace {

/// n points with a metric given by a distance matrix and a positive atomic measure.
class FiniteMetricMeasureSpace {
 public:
  FiniteMetricMeasureSpace() = default;

  FiniteMetricMeasureSpace(DenseMatrix distance, Vec measure)
      : distance_(std::move(distance)), measure_(std::move(measure)) {
    const std::size_t n = measure_.size();
    require(n >= 1, ErrorKind::precondition, "metric space needs at least one point");
    require(distance_.rows() == n && distance_.cols() == n, ErrorKind::dimension,
            "distance matrix must be n x n for n measure entries");
    for (double m : measure_) require(std::isfinite(m) && m > 0.0, ErrorKind::precondition, "measure must be positive");
    const double scale = std::max(1.0, norm_inf(distance_.data()));
    const double tol = 1e-12 * scale;
    for (std::size_t i = 0; i < n; ++i) {
      require(distance_(i, i) == 0.0, ErrorKind::precondition, "distance matrix must have zero diagonal");
      for (std::size_t j = 0; j < n; ++j) {
        const double d = distance_(i, j);
        require(std::isfinite(d), ErrorKind::precondition, "distances must be finite");
        require(std::abs(d - distance_(j, i)) <= tol, ErrorKind::precondition, "distance matrix must be symmetric");
        if (i != j) require(d > 0.0, ErrorKind::precondition, "distinct points must have positive distance");
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          require(distance_(i, j) <= distance_(i, k) + distance_(k, j) + tol, ErrorKind::precondition,
                  "distance matrix violates the triangle inequality");
  }

  /// Points on the real line with the induced metric.
  static FiniteMetricMeasureSpace on_line(const Vec& positions, Vec measure) {
    const std::size_t n = positions.size();
    DenseMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::abs(positions[i] - positions[j]);
    return FiniteMetricMeasureSpace(std::move(d), std::move(measure));
  }

  std::size_t size() const noexcept { return measure_.size(); }
  double distance(std::size_t i, std::size_t j) const { return distance_(i, j); }
  const DenseMatrix& distances() const noexcept { return distance_; }
  double measure(std::size_t i) const { return measure_[i]; }
  const Vec& measures() const noexcept { return measure_; }

  /// Closed ball {y : d(x, y) <= r}.
  std::vector<std::size_t> ball(std::size_t center, double radius) const {
    std::vector<std::size_t> out;
    const double slack = 1e-12 * std::max(1.0, radius);
    for (std::size_t y = 0; y < size(); ++y)
      if (distance_(center, y) <= radius + slack) out.push_back(y);
    return out;
  }

  double measure_of(const std::vector<std::size_t>& set) const {
    double m = 0.0;
    for (std::size_t i : set) m += measure_[i];
    return m;
  }

  /// Distinct positive pairwise distances, ascending.
  Vec radii() const {
    Vec r;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j) r.push_back(distance_(i, j));
    std::sort(r.begin(), r.end());
    Vec distinct;
    for (double v : r)
      if (distinct.empty() || v > distinct.back() * (1.0 + 1e-12)) distinct.push_back(v);
    return distinct;
  }

 private:
  DenseMatrix distance_;
  Vec measure_;
};

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  double length = 1.0;
};

class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(std::size_t vertices, std::vector<Edge> edges) : vertices_(vertices), edges_(std::move(edges)) {
    require(vertices_ >= 1, ErrorKind::precondition, "graph needs at least one vertex");
    for (const auto& e : edges_) {
      require(e.from < vertices_ && e.to < vertices_, ErrorKind::dimension, "edge endpoint out of range");
      require(e.from != e.to, ErrorKind::precondition, "self-loops are not allowed");
      require(std::isfinite(e.length) && e.length > 0.0, ErrorKind::precondition, "edge lengths must be positive");
    }
  }

  static WeightedGraph path(const Vec& lengths) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < lengths.size(); ++i) edges.push_back({i, i + 1, lengths[i]});
    return WeightedGraph(lengths.size() + 1, std::move(edges));
  }

  std::size_t vertex_count() const noexcept { return vertices_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  Vec edge_lengths() const {
    Vec l;
    for (const auto& e : edges_) l.push_back(e.length);
    return l;
  }

  bool connected() const {
    std::vector<std::size_t> parent(vertices_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::size_t components = vertices_;
    for (const auto& e : edges_) {
      const auto a = find(e.from), b = find(e.to);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
    return components == 1;
  }

  /// Shortest-path metric (Floyd-Warshall). Requires a connected graph.
  DenseMatrix path_metric() const {
    require(connected(), ErrorKind::precondition, "path metric needs a connected graph");
    const double inf = std::numeric_limits<double>::infinity();
    DenseMatrix d(vertices_, vertices_, inf);
    for (std::size_t i = 0; i < vertices_; ++i) d(i, i) = 0.0;
    for (const auto& e : edges_) {
      d(e.from, e.to) = std::min(d(e.from, e.to), e.length);
      d(e.to, e.from) = d(e.from, e.to);
    }
    for (std::size_t k = 0; k < vertices_; ++k)
      for (std::size_t i = 0; i < vertices_; ++i)
        for (std::size_t j = 0; j < vertices_; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    return d;
  }

 private:
  std::size_t vertices_ = 0;
  std::vector<Edge> edges_;
};

}  // namespace gradspace
