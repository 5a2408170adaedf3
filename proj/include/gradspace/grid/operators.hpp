#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gradspace/core/relation.hpp"
#include "gradspace/grid/domain.hpp"

namespace gradspace {

/// Per-node gradient, n components per node (node-major): forward differences,
/// backward difference at the far end of each axis.
inline Vec grid_gradient(const Vec& u, const GridDomain& dom) {
  require_same_size(u.size(), dom.node_count(), "grid_gradient field");
  const std::size_t n = dom.axes();
  Vec g(u.size() * n, 0.0);
  for (std::size_t x = 0; x < u.size(); ++x)
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t i = dom.axis_index(x, a);
      const std::size_t s = dom.stride(a);
      if (dom.dims()[a] == 1) continue;
      g[x * n + a] = i + 1 < dom.dims()[a] ? (u[x + s] - u[x]) / dom.h() : (u[x] - u[x - s]) / dom.h();
    }
  return g;
}

namespace detail {

/// Forward-difference rows of the gradient at a cell (one row per axis).
inline std::vector<SparseRow> cell_gradient_rows(const GridDomain& dom, std::size_t cell) {
  std::vector<SparseRow> rows(dom.axes());
  for (std::size_t a = 0; a < dom.axes(); ++a) {
    if (dom.dims()[a] == 1) continue;
    rows[a] = {{cell + dom.stride(a), 1.0 / dom.h()}, {cell, -1.0 / dom.h()}};
  }
  return rows;
}

/// Rows of the coefficient-transformed cell gradients, block weights h^n w(x).
inline void append_gradient_rows(const GridDomain& dom, const CoefficientField& coeff, std::vector<SparseRow>& rows,
                                 Vec& weights, std::vector<std::size_t>& blocks) {
  require_same_size(coeff.size(), dom.node_count(), "coefficient field");
  const std::size_t n = dom.axes();
  for (std::size_t c : dom.cells()) {
    const auto grad = cell_gradient_rows(dom, c);
    if (coeff.is_matrix()) {
      const DenseMatrix& a = coeff.matrix_at(c);
      require(a.rows() == n, ErrorKind::dimension, "coefficient matrices must be n x n");
      for (std::size_t k = 0; k < n; ++k) {
        SparseRow r;
        for (std::size_t j = 0; j < n; ++j)
          for (const auto& [idx, v] : grad[j]) r.push_back({idx, a(k, j) * v});
        rows.push_back(std::move(r));
      }
    } else {
      for (const auto& r : grad) rows.push_back(r);
    }
    weights.push_back(dom.cell_volume() * coeff.weight(c));
    blocks.push_back(n);
  }
}

}  // namespace detail

/// Linear-graph relation u -> A(x) grad u (or grad u with weight w) with
/// V = L^p(h^n) on nodes and W = L^p over cells.
inline GradientRelation grid_relation(const GridDomain& dom, double p, const CoefficientField& coeff) {
  std::vector<SparseRow> rows;
  Vec weights;
  std::vector<std::size_t> blocks;
  detail::append_gradient_rows(dom, coeff, rows, weights, blocks);
  SpaceDescriptor w(SpaceKind::euclidean_grid, rows.size(), NormSpec::weighted_lp(p, std::move(weights), std::move(blocks)));
  return GradientRelation::linear_graph(SparseMatrix(rows.size(), dom.node_count(), rows), dom.node_space(p), std::move(w));
}

inline GradientRelation grid_relation(const GridDomain& dom, double p) {
  return grid_relation(dom, p, CoefficientField::uniform(dom.node_count()));
}

/// Scalar relation g >= |grad u| per cell.
inline GradientRelation scalar_gradient_relation(const GridDomain& dom, double p) {
  GradientRelation::Envelope env;
  env.combine = GradientRelation::Envelope::Combine::euclidean;
  for (std::size_t c : dom.cells()) {
    auto rows = detail::cell_gradient_rows(dom, c);
    std::erase_if(rows, [](const SparseRow& r) { return r.empty(); });
    if (rows.empty()) rows.push_back({});
    env.groups.push_back(std::move(rows));
  }
  const std::size_t m = env.groups.size();
  SpaceDescriptor w(SpaceKind::euclidean_grid, m, NormSpec::uniform_lp(p, m, dom.cell_volume()));
  return GradientRelation::envelope(std::move(env), dom.node_space(p), std::move(w));
}

/// sum over cells of h^n w(x) |A(x) grad u|^p
inline double p_energy(const Vec& u, const GridDomain& dom, double p, const CoefficientField& coeff) {
  require(std::isfinite(p) && p > 1.0, ErrorKind::precondition, "p_energy needs p > 1");
  require_same_size(u.size(), dom.node_count(), "p_energy field");
  require_same_size(coeff.size(), dom.node_count(), "coefficient field");
  const std::size_t n = dom.axes();
  double total = 0.0;
  Vec d(n), ad(n);
  for (std::size_t c : dom.cells()) {
    for (std::size_t a = 0; a < n; ++a) d[a] = dom.dims()[a] == 1 ? 0.0 : (u[c + dom.stride(a)] - u[c]) / dom.h();
    double sq = 0.0;
    if (coeff.is_matrix()) {
      ad = coeff.matrix_at(c).apply(d);
      sq = dot(ad, ad);
    } else {
      sq = dot(d, d);
    }
    total += dom.cell_volume() * coeff.weight(c) * std::pow(sq, 0.5 * p);
  }
  return total;
}

inline double p_energy(const Vec& u, const GridDomain& dom, double p) {
  return p_energy(u, dom, p, CoefficientField::uniform(dom.node_count()));
}

/// Discrete p-Laplace residual: max over interior nodes of |dE/du_x| / (p h^n),
/// the divergence of w |A grad u|^(p-2) A^T A grad u in difference form.
inline double p_laplace_residual(const Vec& u, const GridDomain& dom, double p, const CoefficientField& coeff) {
  const auto rel = grid_relation(dom, p, coeff);
  const auto& lin = std::get<GradientRelation::LinearGraph>(rel.payload());
  const Vec grad = lin.map.apply_transpose(rel.w_space().norm.power_gradient(lin.map.apply(u)));
  double worst = 0.0;
  for (std::size_t x = 0; x < u.size(); ++x)
    if (dom.interior()[x]) worst = std::max(worst, std::abs(grad[x]));
  return worst / (p * dom.cell_volume());
}

/// Centred second-difference Laplacian rows at the nodes where the stencil fits.
inline std::vector<SparseRow> laplacian_rows(const GridDomain& dom) {
  std::vector<SparseRow> rows;
  const double ih2 = 1.0 / (dom.h() * dom.h());
  for (std::size_t x : dom.stencil_nodes()) {
    SparseRow r;
    for (std::size_t a = 0; a < dom.axes(); ++a) {
      if (dom.dims()[a] == 1) continue;
      const std::size_t s = dom.stride(a);
      r.push_back({x - s, ih2});
      r.push_back({x, -2.0 * ih2});
      r.push_back({x + s, ih2});
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Discrete maximal operator on a box grid: at each node the largest average
/// over closed balls of radius k h, k = 0, 1, ..., up to the grid diameter.
inline BallAverageMax maximal_operator(const std::vector<std::size_t>& dims) {
  const GridDomain box(dims, 1.0, std::vector<bool>([&] {
                         std::size_t c = 1;
                         for (auto d : dims) c *= d;
                         return c;
                       }(), false));
  const std::size_t count = box.node_count();
  std::size_t diam2 = 0;
  for (auto d : dims) diam2 += (d - 1) * (d - 1);
  const auto kmax = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(diam2))));

  BallAverageMax op;
  op.input_dim = count;
  op.balls.resize(count);
  std::vector<std::pair<std::size_t, std::size_t>> by_dist(count);
  for (std::size_t x = 0; x < count; ++x) {
    const auto ix = box.multi_index(x);
    for (std::size_t y = 0; y < count; ++y) {
      const auto iy = box.multi_index(y);
      std::size_t d2 = 0;
      for (std::size_t a = 0; a < ix.size(); ++a) {
        const auto diff = static_cast<long long>(ix[a]) - static_cast<long long>(iy[a]);
        d2 += static_cast<std::size_t>(diff * diff);
      }
      by_dist[y] = {d2, y};
    }
    std::sort(by_dist.begin(), by_dist.end());
    std::size_t taken = 0;
    std::size_t last_size = 0;
    for (std::size_t k = 0; k <= kmax; ++k) {
      while (taken < count && by_dist[taken].first <= k * k) ++taken;
      if (taken == last_size) continue;
      last_size = taken;
      SparseRow avg;
      for (std::size_t t = 0; t < taken; ++t) avg.push_back({by_dist[t].second, 1.0 / static_cast<double>(taken)});
      op.balls[x].push_back(std::move(avg));
    }
  }
  return op;
}

/// Hardy-Littlewood type maximal function of a nonnegative node field.
inline Vec maximal_function(const Vec& v, const GridDomain& dom) {
  require_same_size(v.size(), dom.node_count(), "maximal_function field");
  for (double x : v) require(x >= 0.0, ErrorKind::precondition, "maximal_function needs a nonnegative field");
  return maximal_operator(dom.dims()).apply(v);
}

/// Envelope relation g >= M |grad u| over cells.
inline GradientRelation maximal_gradient_relation(const GridDomain& dom, double p) {
  const auto base = scalar_gradient_relation(dom, p);
  auto env = std::get<GradientRelation::Envelope>(base.payload());
  env.maximal = maximal_operator(dom.cell_dims());
  return GradientRelation::envelope(std::move(env), base.v_space(), base.w_space());
}

}  // namespace gradspace
