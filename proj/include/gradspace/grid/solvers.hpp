#pragma once

#include <variant>
#include <vector>

#include "gradspace/grid/domain.hpp"
#include "gradspace/grid/operators.hpp"
#include "gradspace/variational/dirichlet.hpp"

namespace gradspace {

/// Minimise the p-energy over fields matching the boundary values. The
/// report's stationarity is the discrete p-Laplace residual.
inline SolveReport solve_p_laplace(const GridDomain& dom, double p, const CoefficientField& coeff,
                                   const SolverConfig& cfg = {}) {
  const auto rel = grid_relation(dom, p, coeff);
  auto rep = solve_dirichlet(rel, dom.zero_boundary(), Element(rel.v_space(), dom.lift()), cfg);
  rep.stationarity = p_laplace_residual(rep.minimizer.coords(), dom, p, coeff);
  return rep;
}

inline SolveReport solve_p_laplace(const GridDomain& dom, double p, const SolverConfig& cfg = {}) {
  return solve_p_laplace(dom, p, CoefficientField::uniform(dom.node_count()), cfg);
}

/// Zero-order part of a mixed functional: the identity, or the indicator of a node set E.
struct MixedLambda {
  struct Identity {};
  struct Mask {
    std::vector<bool> nodes;
  };
  std::variant<Identity, Mask> kind = Identity{};

  static MixedLambda identity() { return {Identity{}}; }
  static MixedLambda mask(std::vector<bool> e) { return {Mask{std::move(e)}}; }
};

/// Relation u -> (Lambda u, grad u) with W = L^p over nodes of E and cells.
inline GradientRelation mixed_relation(const GridDomain& dom, double p, const MixedLambda& lam) {
  std::vector<SparseRow> rows;
  Vec weights;
  std::vector<std::size_t> blocks;
  for (std::size_t x = 0; x < dom.node_count(); ++x) {
    bool take = true;
    if (const auto* m = std::get_if<MixedLambda::Mask>(&lam.kind)) {
      require_same_size(m->nodes.size(), dom.node_count(), "mixed functional mask");
      take = m->nodes[x];
    }
    if (!take) continue;
    rows.push_back({{x, 1.0}});
    weights.push_back(dom.cell_volume());
    blocks.push_back(1);
  }
  detail::append_gradient_rows(dom, CoefficientField::uniform(dom.node_count()), rows, weights, blocks);
  SpaceDescriptor w(SpaceKind::euclidean_grid, rows.size(), NormSpec::weighted_lp(p, std::move(weights), std::move(blocks)));
  return GradientRelation::linear_graph(SparseMatrix(rows.size(), dom.node_count(), rows), dom.node_space(p), std::move(w));
}

/// Minimise sum (|Lambda u|^p + |grad u|^p) h^n over fields matching the boundary values.
inline SolveReport solve_mixed_functional(const GridDomain& dom, double p, const MixedLambda& lam,
                                          const SolverConfig& cfg = {}) {
  const auto rel = mixed_relation(dom, p, lam);
  return solve_dirichlet(rel, dom.zero_boundary(), Element(rel.v_space(), dom.lift()), cfg);
}

/// Relation u -> Delta_h u on the nodes where the stencil fits; V = W = L^2.
inline GradientRelation biharmonic_relation(const GridDomain& dom) {
  const auto rows = laplacian_rows(dom);
  require(!rows.empty(), ErrorKind::precondition, "biharmonic problem needs nodes with a full Laplacian stencil");
  SpaceDescriptor w(SpaceKind::euclidean_grid, rows.size(), NormSpec::uniform_lp(2.0, rows.size(), dom.cell_volume()));
  return GradientRelation::linear_graph(SparseMatrix(rows.size(), dom.node_count(), rows), dom.node_space(2.0),
                                        std::move(w));
}

/// Minimise sum |Delta_h u|^2 h^n with two boundary layers fixed (u and its
/// normal difference prescribed).
inline SolveReport solve_biharmonic(const GridDomain& dom, const SolverConfig& cfg = {}) {
  for (std::size_t x = 0; x < dom.node_count(); ++x) {
    if (!dom.interior()[x]) continue;
    for (std::size_t a = 0; a < dom.axes(); ++a) {
      const std::size_t i = dom.axis_index(x, a);
      require(i >= 2 && i + 2 < dom.dims()[a], ErrorKind::precondition,
              "biharmonic problems need two fixed boundary layers");
    }
  }
  const auto rel = biharmonic_relation(dom);
  return solve_dirichlet(rel, dom.zero_boundary(), Element(rel.v_space(), dom.lift()), cfg);
}

}  // namespace gradspace
