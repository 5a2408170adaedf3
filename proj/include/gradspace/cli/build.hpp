#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gradspace/cli/problem.hpp"
#include "gradspace/config.hpp"
#include "gradspace/core/order.hpp"
#include "gradspace/core/relation.hpp"
#include "gradspace/grid.hpp"
#include "gradspace/matrix.hpp"
#include "gradspace/metric.hpp"
#include "gradspace/variational.hpp"

namespace gradspace::cli {

/// Library objects described by a problem document.
struct Instance {
  std::optional<GridDomain> grid;
  std::optional<CoefficientField> coeff;
  std::optional<FiniteMetricMeasureSpace> metric;
  std::optional<WeightedGraph> graph;
  std::optional<GradientRelation> rel;
  std::optional<FeasibleSet> k0;
  std::optional<Element> f;
  /// Obstacle bounds in V coordinates; infinite entries mean no bound.
  std::vector<Vec> lower;
  std::vector<Vec> upper;
  std::optional<Element> u;
  std::optional<Element> psi1;
  std::optional<Element> psi2;
  std::optional<DenseMatrix> op;
  OrderSpec order;
  NormSpec lattice_norm;
  std::size_t matrix_n = 0;
  SolverConfig cfg;

  /// Full K: K0 with the obstacle bounds folded in (solve problems only).
  FeasibleSet constrained_k0() const {
    FeasibleSet s = *k0;
    for (const auto& psi : lower) s = s.with_order_lower(order, psi - f->coords());
    for (const auto& phi : upper) s = s.with_order_upper(order, phi - f->coords());
    return s;
  }
};

inline SolverConfig make_config(const SolverSection& s) {
  SolverConfig c;
  c.tol_objective = s.tol_objective;
  c.tol_feasibility = s.tol_feasibility;
  c.max_iterations = s.max_iterations;
  c.seed = s.seed;
  return c;
}

namespace detail {

inline void need(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorKind::schema, what);
}

inline GridDomain build_grid(const GridSection& g) {
  if (g.layout == "annulus") return GridDomain::annulus(g.h, g.half, g.inner, g.outer);
  need(!g.dims.empty(), "grid.dims is required for the '" + g.layout + "' layout");
  std::size_t n = 1;
  for (std::size_t d : g.dims) n *= d;
  std::optional<Vec> boundary;
  if (!g.boundary.empty()) {
    need(g.boundary.size() == n, "grid.boundary must have one value per node");
    boundary = g.boundary;
  } else {
    boundary = Vec(n, 0.0);
  }
  if (g.layout == "box") return GridDomain::box(g.dims, g.h, boundary, g.layers, g.origin);
  need(g.interior.size() == n, "grid.interior must have one flag per node");
  return GridDomain(g.dims, g.h, g.interior, boundary, g.origin);
}

inline Vec sized(const Vec& v, std::size_t n, const std::string& what) {
  if (v.empty()) return Vec(n, 0.0);
  need(v.size() == n, what + " must have " + std::to_string(n) + " entries");
  return v;
}

inline std::size_t side_of(std::size_t n, std::size_t dim, const std::string& what) {
  if (n) {
    need(n * n == dim, what + " must have n*n entries");
    return n;
  }
  const auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(dim))));
  need(s >= 1 && s * s == dim, what + " must be a square matrix in row-major order");
  return s;
}

inline std::string default_variant(const std::string& instance) {
  if (instance == "grid") return "gradient";
  if (instance == "metric") return "hajlasz";
  if (instance == "graph") return "graph-edge";
  if (instance == "matrix") return "commutator";
  return "toy-complex-max";
}

inline void check_variant(const std::string& instance, const std::string& variant) {
  const bool ok = (instance == "grid" && (variant == "gradient" || variant == "maximal" || variant == "mixed")) ||
                  (instance == "metric" && (variant == "hajlasz" || variant == "ball-poincare")) ||
                  (instance == "graph" && variant == "graph-edge") ||
                  (instance == "matrix" && (variant == "commutator" || variant == "bounded-below")) ||
                  (instance == "toy-complex" && variant == "toy-complex-max");
  need(ok, "relation variant '" + variant + "' is not available on a " + instance + " instance");
}

inline GradientRelation build_relation(const ProblemFile& pf, Instance& in) {
  const std::string variant = pf.relation.variant.empty() ? default_variant(pf.instance) : pf.relation.variant;
  check_variant(pf.instance, variant);
  const double pv = pf.norms.p_V, pw = pf.norms.p_W;
  if (pf.instance == "grid") {
    const GridDomain& dom = *in.grid;
    if (variant == "gradient") {
      in.coeff = pf.grid->coefficient.empty() ? CoefficientField::uniform(dom.node_count())
                                              : CoefficientField::scalar(sized(pf.grid->coefficient, dom.node_count(),
                                                                               "grid.coefficient"));
      const auto base = grid_relation(dom, pw, *in.coeff);
      const auto& lin = std::get<GradientRelation::LinearGraph>(base.payload());
      return GradientRelation::linear_graph(lin.map, dom.node_space(pv), base.w_space());
    }
    need(pv == pw, "grid '" + variant + "' relations use a single exponent (p_V = p_W)");
    if (variant == "maximal") return maximal_gradient_relation(dom, pw);
    return mixed_relation(dom, pw, MixedLambda::identity());
  }
  if (pf.instance == "metric") {
    need(pv == pw, "metric relations use a single exponent (p_V = p_W)");
    if (variant == "hajlasz") return GradientRelation::hajlasz(*in.metric, pw);
    return GradientRelation::ball_poincare(*in.metric, pw, pf.relation.lambda);
  }
  if (pf.instance == "graph") {
    need(pv == pw, "graph relations use a single exponent (p_V = p_W)");
    return GradientRelation::graph_edge(*in.graph, pw);
  }
  if (pf.instance == "matrix") {
    need(pv == pw, "matrix relations use a single Schatten exponent (p_V = p_W)");
    const MatrixSection& m = *pf.matrix;
    if (variant == "commutator") {
      need(!m.delta.empty(), "matrix.delta is required for the commutator relation");
      in.matrix_n = side_of(m.n, m.delta.size(), "matrix.delta");
      return commutator_relation(SymmetricMatrix(in.matrix_n, m.delta), pw);
    }
    need(!m.m.empty(), "matrix.m is required for the bounded-below relation");
    in.matrix_n = side_of(m.n, m.m.size(), "matrix.m");
    return bounded_below_relation(SymmetricMatrix(in.matrix_n, m.m), pw);
  }
  need(pv == 2.0 && pw == 2.0, "the toy complex instance uses the modulus and absolute value (p = 2)");
  return GradientRelation::toy_complex_max();
}

}  // namespace detail

/// Build every object the problem needs. Dimension and consistency problems
/// surface as schema errors; library preconditions propagate as thrown.
inline Instance build_instance(const ProblemFile& pf) {
  using detail::need;
  Instance in;
  in.cfg = make_config(pf.solver);
  in.order = pf.order == "psd" ? OrderSpec::psd() : OrderSpec::componentwise();

  need((pf.instance == "grid") == pf.grid.has_value(), "the 'grid' section is required exactly for grid instances");
  need((pf.instance == "metric") == pf.metric.has_value(), "the 'metric' section is required exactly for metric instances");
  need((pf.instance == "graph") == pf.graph.has_value(), "the 'graph' section is required exactly for graph instances");
  need(pf.instance != "matrix" || pf.matrix.has_value(), "matrix instances need a 'matrix' section");

  if (pf.grid) in.grid = detail::build_grid(*pf.grid);
  if (pf.metric) {
    const auto& m = *pf.metric;
    need(m.distance.empty() != m.positions.empty(), "metric needs exactly one of 'distance' or 'positions'");
    const std::size_t n = m.distance.empty() ? m.positions.size() : m.distance.size();
    need(n >= 1, "metric space needs at least one point");
    Vec measure = m.measure.empty() ? Vec(n, 1.0) : m.measure;
    need(measure.size() == n, "metric.measure must have one entry per point");
    if (!m.positions.empty()) {
      in.metric = FiniteMetricMeasureSpace::on_line(m.positions, measure);
    } else {
      DenseMatrix d(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        need(m.distance[i].size() == n, "metric.distance must be square");
        for (std::size_t j = 0; j < n; ++j) d(i, j) = m.distance[i][j];
      }
      in.metric = FiniteMetricMeasureSpace(d, measure);
    }
  }
  if (pf.graph) {
    std::vector<Edge> edges;
    for (const auto& e : pf.graph->edges)
      edges.push_back({static_cast<std::size_t>(e[0]), static_cast<std::size_t>(e[1]), e[2]});
    in.graph = WeightedGraph(pf.graph->vertices, std::move(edges));
  }

  const std::string& kind = pf.problem;
  if (kind == "lattice-max" || kind == "lattice-min") {
    need(!pf.data.psi1.empty() && !pf.data.psi2.empty(), "lattice problems need data.psi1 and data.psi2");
    need(pf.data.psi1.size() == pf.data.psi2.size(), "data.psi1 and data.psi2 must have the same size");
    const std::size_t dim = pf.data.psi1.size();
    if (pf.order.empty() && pf.instance == "matrix") in.order = OrderSpec::psd();
    SpaceDescriptor space;
    if (in.order.kind == OrderSpec::Kind::psd) {
      in.matrix_n = detail::side_of(pf.matrix ? pf.matrix->n : 0, dim, "data.psi1");
      in.lattice_norm = NormSpec::schatten(pf.norms.p_V);
      space = matrix_space(in.matrix_n, in.lattice_norm);
    } else {
      in.lattice_norm = NormSpec::weighted_lp(pf.norms.p_V, pf.norms.weights.empty() ? Vec(dim, 1.0) : pf.norms.weights);
      space = SpaceDescriptor(SpaceKind::metric_points, dim, in.lattice_norm);
    }
    in.psi1 = Element(space, pf.data.psi1);
    in.psi2 = Element(space, pf.data.psi2);
    return in;
  }
  if (kind == "fredholm") {
    need(pf.instance == "matrix", "fredholm problems need a matrix instance");
    const auto& m = *pf.matrix;
    need(m.rows >= 1 && m.cols >= 1 && m.entries.size() == m.rows * m.cols,
         "fredholm problems need matrix.rows, matrix.cols and rows*cols matrix.entries");
    in.op = DenseMatrix(m.rows, m.cols, m.entries);
    return in;
  }
  if (kind == "hajlasz" || kind == "poincare-gradient") {
    need(pf.instance == "metric", kind + " problems need a metric instance");
    need(pf.norms.p_V == pf.norms.p_W, "metric relations use a single exponent (p_V = p_W)");
    in.rel = kind == "hajlasz" ? GradientRelation::hajlasz(*in.metric, pf.norms.p_W)
                               : GradientRelation::ball_poincare(*in.metric, pf.norms.p_W, pf.relation.lambda);
    need(pf.data.u.size() == in.metric->size(), "data.u must have one value per point");
    in.u = Element(in.rel->v_space(), pf.data.u);
    return in;
  }
  if (kind == "biharmonic") {
    need(pf.instance == "grid", "biharmonic problems need a grid instance");
    need(pf.norms.p_V == 2.0 && pf.norms.p_W == 2.0, "biharmonic problems are quadratic (p = 2)");
    in.rel = biharmonic_relation(*in.grid);
    in.k0 = in.grid->zero_boundary();
    in.f = Element(in.rel->v_space(), in.grid->lift());
    return in;
  }

  // dirichlet, obstacle, multi-obstacle, rayleigh
  in.rel = detail::build_relation(pf, in);
  const std::size_t n = in.rel->v_space().dimension;
  if (pf.instance == "grid") {
    in.k0 = in.grid->zero_boundary();
    in.f = Element(in.rel->v_space(), in.grid->lift());
  } else {
    if (!pf.data.fixed.empty()) {
      need(pf.data.fixed.size() == n, "data.fixed must have one flag per coordinate");
      in.k0 = FeasibleSet::subspace(pf.data.fixed);
    } else {
      in.k0 = FeasibleSet::whole(n);
    }
    in.f = Element(in.rel->v_space(), detail::sized(pf.data.f, n, "data.f"));
  }
  if (pf.instance == "matrix" && in.matrix_n == 0) in.matrix_n = detail::side_of(0, n, "matrix space");
  if (kind == "obstacle") {
    need(!pf.data.obstacle.empty(), "obstacle problems need data.obstacle");
    in.lower.push_back(detail::sized(pf.data.obstacle, n, "data.obstacle"));
  }
  if (kind == "multi-obstacle") {
    need(!pf.data.lower.empty() || !pf.data.upper.empty(), "multi-obstacle problems need data.lower or data.upper");
    for (const auto& v : pf.data.lower) need(v.size() == n, "each data.lower vector must have one entry per coordinate");
    for (const auto& v : pf.data.upper) need(v.size() == n, "each data.upper vector must have one entry per coordinate");
    in.lower = pf.data.lower;
    in.upper = pf.data.upper;
  }
  if (in.order.kind == OrderSpec::Kind::psd) {
    need(pf.instance == "matrix", "the psd order needs a matrix instance");
    for (const auto* list : {&in.lower, &in.upper})
      for (const auto& v : *list) need(all_finite(v), "psd-order bounds must be finite");
  }
  return in;
}

}  // namespace gradspace::cli
