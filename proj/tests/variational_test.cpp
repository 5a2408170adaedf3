#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gradspace/grid.hpp"
#include "gradspace/metric.hpp"
#include "gradspace/variational.hpp"
#include "test_oracles.hpp"

using namespace gradspace;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

GradientRelation identity_relation(std::size_t n) {
  SpaceDescriptor s(SpaceKind::metric_points, n, NormSpec::euclidean());
  return GradientRelation::linear_graph(SparseMatrix::identity(n), s, s);
}

DenseMatrix second_difference(std::size_t m) {
  DenseMatrix a(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    a(i, i) = 2.0;
    if (i > 0) a(i, i - 1) = -1.0;
    if (i + 1 < m) a(i, i + 1) = -1.0;
  }
  return a;
}

double max_abs_diff(const Vec& a, const Vec& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

}  // namespace

TEST(FeasibleSet, BoxProjectionAndViolation) {
  const auto s = FeasibleSet::whole(3).with_lower({0.0, -inf, 1.0}).with_upper({inf, 2.0, 1.5});
  EXPECT_EQ(s.project({-1.0, 5.0, 0.0}), (Vec{0.0, 2.0, 1.0}));
  EXPECT_NEAR(s.violation({-1.0, 0.0, 1.2}), 1.0, 1e-12);
  EXPECT_TRUE(s.contains({0.5, 0.0, 1.2}, 0.0));
  EXPECT_FALSE(s.is_subspace());
}

TEST(FeasibleSet, HalfspaceProjectionMatchesClosedForm) {
  const auto s = FeasibleSet::whole(2).with_halfspace({1.0, 1.0}, 1.0);
  const Vec got = s.project({2.0, 2.0});
  const Vec want = oracles::halfspace_projection({1.0, 1.0}, 1.0)({2.0, 2.0});
  EXPECT_LE(max_abs_diff(got, want), 1e-10);
}

TEST(FeasibleSet, SubspaceMaskAndShift) {
  const auto s = FeasibleSet::subspace({true, false});
  EXPECT_TRUE(s.is_subspace());
  EXPECT_EQ(s.fixed_mask(), (std::vector<bool>{true, false}));
  const auto t = s.shifted({3.0, 0.0});
  EXPECT_TRUE(t.contains({3.0, -7.0}, 1e-12));
  EXPECT_FALSE(t.contains({0.0, -7.0}, 1e-12));
}

TEST(ConeSpec, RejectsShiftedSet) {
  EXPECT_THROW(ConeSpec(FeasibleSet::whole(2).shifted({1.0, 0.0})), Error);
  EXPECT_THROW(ConeSpec(FeasibleSet::whole(2).with_lower({1.0, 0.0})), Error);
  EXPECT_NO_THROW(ConeSpec(FeasibleSet::whole(2).with_lower({0.0, 0.0})));
}

TEST(SolveDirichlet, IdentityKeepsFixedCoordinates) {
  const auto rel = identity_relation(3);
  const auto rep = solve_dirichlet(rel, FeasibleSet::subspace({true, false, true}), Element(rel.v_space(), {2.0, 5.0, -1.0}));
  EXPECT_LE(max_abs_diff(rep.minimizer.coords(), {2.0, 0.0, -1.0}), 1e-10);
  EXPECT_NEAR(rep.objective, std::sqrt(5.0), 1e-10);
  EXPECT_TRUE(rep.converged);
}

TEST(SolveDirichlet, OneDimensionalLaplaceIsLinear) {
  const auto dom = GridDomain::interval(21, 1.0, 3.0);
  const auto rep = solve_p_laplace(dom, 2.0);
  for (std::size_t x = 0; x < dom.node_count(); ++x)
    EXPECT_NEAR(rep.minimizer[x], 1.0 + 2.0 * dom.coordinate(x)[0], 1e-9);
}

TEST(SolveDirichlet, ToyComplexAttainsUnitObjective) {
  const auto rel = GradientRelation::toy_complex_max();
  const auto k0 = FeasibleSet::whole(2).with_lower({0.0, -inf});
  const auto rep = solve_dirichlet(rel, k0, Element(rel.v_space(), {1.0, 0.0}));
  EXPECT_NEAR(rep.objective, 1.0, 1e-8);
  EXPECT_NEAR(rep.minimizer[0], 1.0, 1e-6);
  EXPECT_LE(std::abs(rep.minimizer[1]), 1.0 + 1e-6);
}

TEST(SolveDirichlet, HajlaszMinimizerIsSeedIndependent) {
  const auto X = FiniteMetricMeasureSpace::on_line({0.0, 1.0, 2.0, 4.0}, {1.0, 1.0, 2.0, 1.0});
  const auto rel = GradientRelation::hajlasz(X, 2.0);
  const auto k0 = FeasibleSet::subspace({true, false, false, true});
  const Element f(rel.v_space(), {0.0, 0.0, 0.0, 1.0});
  SolverConfig a, b;
  a.seed = 3;
  b.seed = 17;
  const auto ra = solve_dirichlet(rel, k0, f, a);
  const auto rb = solve_dirichlet(rel, k0, f, b);
  EXPECT_NEAR(ra.objective, rb.objective, 1e-8);
  EXPECT_LE(max_abs_diff(ra.minimizer.coords(), rb.minimizer.coords()), 1e-6);
}

TEST(SolveDirichlet, MaximalRelationUsesInteriorPoint) {
  const auto dom = GridDomain::interval(9, 0.0, 1.0);
  const auto rel = maximal_gradient_relation(dom, 2.0);
  const auto rep = solve_dirichlet(rel, dom.zero_boundary(), Element(rel.v_space(), dom.lift()));
  EXPECT_EQ(rep.method, "interior-point");
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(rep.feasibility_residual, 1e-9);
}

TEST(SolveDirichlet, HomogeneousInBoundaryData) {
  const auto X = FiniteMetricMeasureSpace::on_line({0.0, 1.0, 3.0}, {1.0, 2.0, 1.0});
  const auto rel = GradientRelation::hajlasz(X, 2.0);
  const auto k0 = FeasibleSet::subspace({true, false, true});
  const Vec f{1.0, 0.0, -2.0};
  const auto base = solve_dirichlet(rel, k0, Element(rel.v_space(), f));
  for (double alpha : {0.5, 3.0}) {
    const auto rep = solve_dirichlet(rel, k0, Element(rel.v_space(), scaled(alpha, f)));
    EXPECT_NEAR(rep.objective, alpha * base.objective, 1e-6 * alpha);
  }
}

TEST(SolveDirichlet, ContradictoryBoundsAreInfeasible) {
  const auto rel = identity_relation(2);
  const auto k0 = FeasibleSet::whole(2).with_lower({1.0, 0.0}).with_upper({0.0, 0.0});
  try {
    solve_dirichlet(rel, k0, Element(rel.v_space(), {0.0, 0.0}));
    FAIL() << "expected an infeasible error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::infeasible);
  }
}

TEST(SolveObstacle, MatchesBoxQpOracle) {
  const std::size_t nodes = 41;
  const auto dom = GridDomain::interval(nodes, 0.0, 0.0);
  const auto rel = grid_relation(dom, 2.0);
  Vec psi(nodes);
  for (std::size_t x = 0; x < nodes; ++x) {
    const double t = dom.coordinate(x)[0];
    psi[x] = 0.5 - 4.0 * (t - 0.4) * (t - 0.4);
  }
  const auto rep = solve_obstacle(rel, dom.zero_boundary(), Element(rel.v_space(), Vec(nodes, 0.0)),
                                  Element(rel.v_space(), psi));
  const std::size_t m = nodes - 2;
  Vec lo(psi.begin() + 1, psi.end() - 1), hi(m, inf);
  const Vec want = oracles::box_qp_active_set(second_difference(m), Vec(m, 0.0), lo, hi);
  for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(rep.minimizer[i + 1], want[i], 1e-6);
  for (std::size_t x = 0; x < nodes; ++x) EXPECT_GE(rep.minimizer[x], psi[x] - 1e-8);
}

TEST(SolveObstacle, DominatesObstacleAndUnconstrainedObjective) {
  const auto X = FiniteMetricMeasureSpace::on_line({0.0, 1.0, 2.0, 3.0}, {1.0, 1.0, 1.0, 1.0});
  const auto rel = GradientRelation::hajlasz(X, 2.0);
  const auto k0 = FeasibleSet::subspace({true, false, false, true});
  const Element f(rel.v_space(), {0.0, 0.0, 0.0, 0.0});
  const Element psi(rel.v_space(), {-1.0, 0.5, 0.25, -1.0});
  const auto free = solve_dirichlet(rel, k0, f);
  const auto rep = solve_obstacle(rel, k0, f, psi);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_GE(rep.minimizer[i], psi[i] - 1e-8);
  EXPECT_GE(rep.objective, free.objective - 1e-9);
  EXPECT_GT(rep.objective, 0.1);
}

TEST(SolveObstacle, InfeasibleObstacleThrows) {
  const auto rel = identity_relation(2);
  const auto k0 = FeasibleSet::subspace({true, false});
  EXPECT_FALSE(check_feasible_obstacle(k0, Element(rel.v_space(), {0.0, 0.0}), Element(rel.v_space(), {1.0, 0.0})));
  EXPECT_THROW(solve_obstacle(rel, k0, Element(rel.v_space(), {0.0, 0.0}), Element(rel.v_space(), {1.0, 0.0})), Error);
}

TEST(SolveMultiObstacle, RespectsBothSides) {
  const auto g = WeightedGraph::path({1.0, 1.0, 1.0, 1.0});
  const auto rel = GradientRelation::graph_edge(g, 2.0);
  const auto k0 = FeasibleSet::subspace({true, false, false, false, true});
  const Element f(rel.v_space(), {0.0, 0.0, 0.0, 0.0, 1.0});
  const Element lower(rel.v_space(), {-5.0, 0.6, -5.0, -5.0, -5.0});
  const Element upper(rel.v_space(), {5.0, 5.0, 5.0, 0.2, 5.0});
  const auto rep = solve_multi_obstacle(rel, k0, f, {lower}, {upper});
  EXPECT_GE(rep.minimizer[1], 0.6 - 1e-8);
  EXPECT_LE(rep.minimizer[3], 0.2 + 1e-8);
  EXPECT_LE(rep.feasibility_residual, 1e-8);
  EXPECT_THROW(solve_multi_obstacle(rel, k0, f, {Element(rel.v_space(), {0, 1, 0, 0, 0})},
                                    {Element(rel.v_space(), {0, 0.5, 0, 0, 1})}),
               Error);
}

TEST(Rayleigh, IntervalMatchesDiscreteEigenvalue) {
  const std::size_t nodes = 51;
  const auto dom = GridDomain::interval(nodes, 0.0, 0.0);
  const auto sol = minimize_rayleigh(grid_relation(dom, 2.0), ConeSpec(dom.zero_boundary()));
  const double h = dom.h();
  const double want = 2.0 / h * std::sin(std::numbers::pi * h / 2.0);
  EXPECT_NEAR(sol.value, want, 1e-5 * want);
  EXPECT_NEAR(sol.u.norm(), 1.0, 1e-8);
}

TEST(Rayleigh, QuotientIsScaleInvariant) {
  const auto dom = GridDomain::interval(11, 0.0, 0.0);
  const auto rel = grid_relation(dom, 2.0);
  Vec u(11);
  for (std::size_t x = 1; x + 1 < 11; ++x) u[x] = std::sin(3.0 * static_cast<double>(x));
  const double r = rayleigh_quotient(rel, Element(rel.v_space(), u));
  for (double alpha : {0.5, 2.0, 10.0})
    EXPECT_NEAR(rayleigh_quotient(rel, Element(rel.v_space(), scaled(alpha, u))), r, 1e-12 * r);
  EXPECT_THROW(rayleigh_quotient(rel, Element(rel.v_space(), Vec(11, 0.0))), Error);
}

TEST(Rayleigh, RkConeReportFlagsKernel) {
  SpaceDescriptor s(SpaceKind::metric_points, 2, NormSpec::euclidean());
  const auto rel = GradientRelation::linear_graph(SparseMatrix(2, 2, {SparseRow{{0, 2.0}}, SparseRow{}}), s, s);
  const auto rep = verify_rk_cone(rel, ConeSpec::whole(2), {Element(s, {1.0, 0.0}), Element(s, {0.0, 1.0})});
  EXPECT_FALSE(rep.regular);
  EXPECT_EQ(rep.violating_sample, std::optional<std::size_t>(1));
  const auto ok = verify_rk_cone(rel, ConeSpec(FeasibleSet::subspace({false, true})), {Element(s, {1.0, 0.0})});
  EXPECT_TRUE(ok.regular);
  EXPECT_NEAR(ok.poincare_constant, 0.5, 1e-12);
}
