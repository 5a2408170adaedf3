#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "gradspace/core/space.hpp"
#include "gradspace/engine/eigh.hpp"
#include "gradspace/linalg.hpp"
#include "gradspace/variational/feasible.hpp"

namespace gradspace {

/// Rectangular node grid with spacing h. Nodes are numbered row-major (last
/// axis fastest). Interior nodes are free; every other node carries a
/// boundary value.
class GridDomain {
 public:
  GridDomain() = default;
  GridDomain(std::vector<std::size_t> dims, double h, std::vector<bool> interior,
             std::optional<Vec> boundary_values = std::nullopt, Vec origin = {})
      : dims_(std::move(dims)), h_(h), interior_(std::move(interior)), boundary_(std::move(boundary_values)),
        origin_(std::move(origin)) {
    require(!dims_.empty(), ErrorKind::precondition, "grid needs at least one axis");
    for (std::size_t d : dims_) require(d >= 1, ErrorKind::precondition, "grid axes need at least one node");
    require(std::isfinite(h_) && h_ > 0.0, ErrorKind::precondition, "grid spacing must be positive");
    if (origin_.empty()) origin_.assign(dims_.size(), 0.0);
    require_same_size(origin_.size(), dims_.size(), "grid origin");
    strides_.assign(dims_.size(), 1);
    for (std::size_t a = dims_.size() - 1; a-- > 0;) strides_[a] = strides_[a + 1] * dims_[a + 1];
    count_ = strides_[0] * dims_[0];
    require_same_size(interior_.size(), count_, "grid interior mask");
    if (boundary_) {
      require_same_size(boundary_->size(), count_, "grid boundary values");
      require(all_finite(*boundary_), ErrorKind::precondition, "grid boundary values must be finite");
    }
    for (std::size_t x = 0; x < count_; ++x) {
      if (!interior_[x]) continue;
      for (std::size_t a = 0; a < dims_.size(); ++a) {
        const std::size_t i = axis_index(x, a);
        require(i > 0 && i + 1 < dims_[a], ErrorKind::precondition,
                "interior grid nodes need both neighbours along every axis");
      }
    }
  }

  /// Box grid whose outer `layers` node layers are boundary nodes.
  static GridDomain box(std::vector<std::size_t> dims, double h, std::optional<Vec> boundary_values = std::nullopt,
                        std::size_t layers = 1, Vec origin = {}) {
    GridDomain probe(dims, h, std::vector<bool>(product(dims), false), std::nullopt, origin);
    std::vector<bool> interior(probe.count_, true);
    for (std::size_t x = 0; x < probe.count_; ++x)
      for (std::size_t a = 0; a < dims.size(); ++a) {
        const std::size_t i = probe.axis_index(x, a);
        if (i < layers || i + layers >= dims[a]) interior[x] = false;
      }
    return GridDomain(std::move(dims), h, std::move(interior), std::move(boundary_values), std::move(origin));
  }

  /// [0, 1] with `nodes` nodes, u(0) = left, u(1) = right.
  static GridDomain interval(std::size_t nodes, double left, double right) {
    require(nodes >= 2, ErrorKind::precondition, "interval needs at least two nodes");
    Vec b(nodes, 0.0);
    b.front() = left;
    b.back() = right;
    return box({nodes}, 1.0 / static_cast<double>(nodes - 1), std::move(b));
  }

  /// [-half, half]^2 with nodes at |x| <= inner fixed to 1, |x| >= outer fixed to 0.
  static GridDomain annulus(double h, double half = 2.5, double inner = 1.0, double outer = 2.0) {
    const auto n = static_cast<std::size_t>(std::llround(2.0 * half / h)) + 1;
    GridDomain probe({n, n}, h, std::vector<bool>(n * n, false), std::nullopt, {-half, -half});
    std::vector<bool> interior(n * n, false);
    Vec b(n * n, 0.0);
    const double slack = 1e-12;
    for (std::size_t x = 0; x < n * n; ++x) {
      const Vec c = probe.coordinate(x);
      const double r = std::hypot(c[0], c[1]);
      if (r <= inner + slack) b[x] = 1.0;
      else if (r < outer - slack) interior[x] = true;
    }
    return GridDomain({n, n}, h, std::move(interior), std::move(b), {-half, -half});
  }

  GridDomain with_boundary(Vec values) const {
    return GridDomain(dims_, h_, interior_, std::move(values), origin_);
  }

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t axes() const noexcept { return dims_.size(); }
  std::size_t node_count() const noexcept { return count_; }
  double h() const noexcept { return h_; }
  /// Volume element h^n.
  double cell_volume() const { return std::pow(h_, static_cast<double>(axes())); }
  const std::vector<bool>& interior() const noexcept { return interior_; }
  const std::optional<Vec>& boundary_values() const noexcept { return boundary_; }
  const Vec& origin() const noexcept { return origin_; }

  std::size_t axis_index(std::size_t node, std::size_t axis) const { return (node / strides_[axis]) % dims_[axis]; }
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }

  std::vector<std::size_t> multi_index(std::size_t node) const {
    std::vector<std::size_t> idx(axes());
    for (std::size_t a = 0; a < axes(); ++a) idx[a] = axis_index(node, a);
    return idx;
  }

  Vec coordinate(std::size_t node) const {
    Vec c(axes());
    for (std::size_t a = 0; a < axes(); ++a) c[a] = origin_[a] + h_ * static_cast<double>(axis_index(node, a));
    return c;
  }

  /// Nodes whose forward neighbour exists along every axis, in node order.
  /// They form the box grid with dims - 1 per axis (at least 1).
  std::vector<std::size_t> cells() const {
    std::vector<std::size_t> out;
    for (std::size_t x = 0; x < count_; ++x) {
      bool ok = true;
      for (std::size_t a = 0; a < axes() && ok; ++a)
        if (dims_[a] > 1 && axis_index(x, a) + 1 >= dims_[a]) ok = false;
      if (ok) out.push_back(x);
    }
    return out;
  }

  std::vector<std::size_t> cell_dims() const {
    std::vector<std::size_t> d(dims_);
    for (auto& v : d) v = v > 1 ? v - 1 : 1;
    return d;
  }

  /// Nodes where the centred second difference fits along every axis.
  std::vector<std::size_t> stencil_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t x = 0; x < count_; ++x) {
      bool ok = true;
      for (std::size_t a = 0; a < axes() && ok; ++a) {
        const std::size_t i = axis_index(x, a);
        if (dims_[a] > 1 && (i == 0 || i + 1 >= dims_[a])) ok = false;
      }
      if (ok) out.push_back(x);
    }
    return out;
  }

  /// L^p(h^n) norm on node fields.
  SpaceDescriptor node_space(double p) const {
    return SpaceDescriptor(SpaceKind::euclidean_grid, count_, NormSpec::uniform_lp(p, count_, cell_volume()));
  }

  /// Boundary values on boundary nodes, zero on interior nodes.
  Vec lift() const {
    require(boundary_.has_value(), ErrorKind::precondition, "grid domain has no boundary values");
    Vec f = *boundary_;
    for (std::size_t x = 0; x < count_; ++x)
      if (interior_[x]) f[x] = 0.0;
    return f;
  }

  /// K0: fields vanishing on every boundary node.
  FeasibleSet zero_boundary() const {
    std::vector<bool> fixed(count_);
    for (std::size_t x = 0; x < count_; ++x) fixed[x] = !interior_[x];
    return FeasibleSet::subspace(std::move(fixed));
  }

 private:
  static std::size_t product(const std::vector<std::size_t>& d) {
    std::size_t p = 1;
    for (std::size_t v : d) p *= v;
    return p;
  }

  std::vector<std::size_t> dims_;
  double h_ = 1.0;
  std::vector<bool> interior_;
  std::optional<Vec> boundary_;
  Vec origin_;
  std::vector<std::size_t> strides_;
  std::size_t count_ = 0;
};

/// Per-node weight w(x) > 0, or per-node matrix A(x) with |A(x) xi| >= alpha |xi|.
class CoefficientField {
 public:
  static CoefficientField uniform(std::size_t nodes) { return scalar(Vec(nodes, 1.0)); }

  static CoefficientField scalar(Vec weights) {
    for (double w : weights) require(std::isfinite(w) && w > 0.0, ErrorKind::precondition, "weights must be positive");
    CoefficientField c;
    c.weights_ = std::move(weights);
    return c;
  }

  static CoefficientField matrix(std::vector<DenseMatrix> a, double alpha) {
    require(alpha > 0.0, ErrorKind::precondition, "ellipticity bound must be positive");
    for (const auto& m : a) {
      require(m.rows() == m.cols(), ErrorKind::dimension, "coefficient matrices must be square");
      require(all_finite(m.data()), ErrorKind::precondition, "coefficient matrices must be finite");
      const Vec sv = engine::singular_values(m);
      require(sv.back() >= alpha * (1.0 - 1e-12), ErrorKind::precondition,
              "coefficient matrix violates the ellipticity bound");
    }
    CoefficientField c;
    c.matrices_ = std::move(a);
    c.alpha_ = alpha;
    return c;
  }

  bool is_matrix() const noexcept { return !matrices_.empty(); }
  std::size_t size() const noexcept { return is_matrix() ? matrices_.size() : weights_.size(); }
  double weight(std::size_t node) const { return is_matrix() ? 1.0 : weights_[node]; }
  const DenseMatrix& matrix_at(std::size_t node) const { return matrices_[node]; }
  double ellipticity() const noexcept { return alpha_; }

 private:
  Vec weights_;
  std::vector<DenseMatrix> matrices_;
  double alpha_ = 0.0;
};

}  // namespace gradspace
