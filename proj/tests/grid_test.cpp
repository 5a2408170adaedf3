#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gradspace/grid.hpp"
#include "test_oracles.hpp"

using namespace gradspace;

namespace {

double max_abs_diff(const Vec& a, const Vec& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

}  // namespace

TEST(GridDomain, IntervalGeometry) {
  const auto dom = GridDomain::interval(5, 1.0, 2.0);
  EXPECT_EQ(dom.node_count(), 5u);
  EXPECT_DOUBLE_EQ(dom.h(), 0.25);
  EXPECT_EQ(dom.interior(), (std::vector<bool>{false, true, true, true, false}));
  EXPECT_EQ(dom.lift(), (Vec{1.0, 0.0, 0.0, 0.0, 2.0}));
  EXPECT_DOUBLE_EQ(dom.coordinate(2)[0], 0.5);
}

TEST(GridDomain, BoxLayersAndAxisIndex) {
  const auto dom = GridDomain::box({6, 7}, 0.1, std::nullopt, 2);
  std::size_t interior = 0;
  for (bool b : dom.interior()) interior += b;
  EXPECT_EQ(interior, 2u * 3u);
  EXPECT_EQ(dom.axis_index(13, 0), 13u / 7u);
  EXPECT_EQ(dom.axis_index(13, 1), 13u % 7u);
  EXPECT_THROW(dom.lift(), Error);
}

TEST(GridDomain, AnnulusBoundaryValues) {
  const auto dom = GridDomain::annulus(0.25);
  for (std::size_t x = 0; x < dom.node_count(); ++x) {
    const Vec c = dom.coordinate(x);
    const double r = std::hypot(c[0], c[1]);
    if (r < 1.0 - 1e-9) {
      EXPECT_FALSE(dom.interior()[x]);
    }
    if (r > 1.0 + 1e-9 && r < 2.0 - 1e-9) {
      EXPECT_TRUE(dom.interior()[x]);
    }
    if (!dom.interior()[x]) {
      EXPECT_EQ((*dom.boundary_values())[x], r <= 1.0 + 1e-9 ? 1.0 : 0.0);
    }
  }
}

TEST(PLaplace, WeightedIntervalMatchesTridiagonalSolve) {
  const std::size_t nodes = 30;
  const auto dom = GridDomain::interval(nodes, 1.0, -2.0);
  Vec w(nodes);
  for (std::size_t x = 0; x < nodes; ++x) w[x] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(x));
  const auto rep = solve_p_laplace(dom, 2.0, CoefficientField::scalar(w));

  const std::size_t m = nodes - 2;
  Vec sub(m, 0.0), diag(m), sup(m, 0.0), rhs(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    diag[k] = w[i - 1] + w[i];
    if (k > 0) sub[k] = -w[i - 1];
    if (k + 1 < m) sup[k] = -w[i];
  }
  rhs.front() += w[0] * 1.0;
  rhs.back() += w[nodes - 2] * -2.0;
  const Vec want = oracles::thomas(sub, diag, sup, rhs);
  for (std::size_t k = 0; k < m; ++k) EXPECT_NEAR(rep.minimizer[k + 1], want[k], 1e-8);
}

TEST(PLaplace, SquareMatchesFivePointSolve) {
  const std::size_t n = 9;
  Vec b(n * n, 0.0);
  for (std::size_t x = 0; x < n * n; ++x) b[x] = static_cast<double>(x % n) * 0.3 - static_cast<double>(x / n) * 0.1 + ((x * 7) % 5 == 0);
  const auto dom = GridDomain::box({n, n}, 0.125, b);
  const auto rep = solve_p_laplace(dom, 2.0);

  std::vector<std::size_t> id(n * n, 0);
  std::size_t m = 0;
  for (std::size_t x = 0; x < n * n; ++x)
    if (dom.interior()[x]) id[x] = m++;
  DenseMatrix a(m, m);
  Vec rhs(m, 0.0);
  for (std::size_t x = 0; x < n * n; ++x) {
    if (!dom.interior()[x]) continue;
    a(id[x], id[x]) = 4.0;
    for (std::size_t y : {x - 1, x + 1, x - n, x + n}) {
      if (dom.interior()[y]) a(id[x], id[y]) = -1.0;
      else rhs[id[x]] += b[y];
    }
  }
  const Vec want = oracles::dense_solve(a, rhs);
  for (std::size_t x = 0; x < n * n; ++x)
    if (dom.interior()[x]) {
      EXPECT_NEAR(rep.minimizer[x], want[id[x]], 1e-8);
    }
}

TEST(PLaplace, NonQuadraticExponentOnIntervalIsLinear) {
  const auto dom = GridDomain::interval(17, 0.0, 1.0);
  for (double p : {1.5, 4.0}) {
    const auto rep = solve_p_laplace(dom, p);
    for (std::size_t x = 0; x < dom.node_count(); ++x) EXPECT_NEAR(rep.minimizer[x], dom.coordinate(x)[0], 1e-6) << p;
  }
}

TEST(PLaplace, AnnulusApproximatesLogProfile) {
  const auto dom = GridDomain::annulus(0.125);
  const auto rep = solve_p_laplace(dom, 2.0);
  double err = 0.0;
  for (std::size_t x = 0; x < dom.node_count(); ++x) {
    if (!dom.interior()[x]) continue;
    const Vec c = dom.coordinate(x);
    err = std::max(err, std::abs(rep.minimizer[x] - (1.0 - std::log2(std::hypot(c[0], c[1])))));
  }
  EXPECT_LT(err, 0.1);
  EXPECT_LT(rep.stationarity, 1e-6);
}

TEST(Biharmonic, IntervalMatchesPentadiagonalSolve) {
  const std::size_t nodes = 14;
  Vec b(nodes, 0.0);
  b[0] = 1.0;
  b[1] = 1.2;
  b[nodes - 2] = -0.5;
  b[nodes - 1] = 0.3;
  const auto dom = GridDomain::box({nodes}, 1.0 / 13.0, b, 2);
  const auto rep = solve_biharmonic(dom);

  const std::size_t m = nodes - 4;
  const double stencil[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
  DenseMatrix a(m, m);
  Vec rhs(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 2;
    for (int d = -2; d <= 2; ++d) {
      const std::size_t j = static_cast<std::size_t>(static_cast<long>(i) + d);
      if (j >= 2 && j < nodes - 2) a(k, j - 2) = stencil[d + 2];
      else rhs[k] -= stencil[d + 2] * b[j];
    }
  }
  const Vec want = oracles::banded_spd_solve(a, rhs, 2);
  for (std::size_t k = 0; k < m; ++k) EXPECT_NEAR(rep.minimizer[k + 2], want[k], 1e-8);
}

TEST(Biharmonic, NeedsTwoBoundaryLayers) {
  EXPECT_THROW(solve_biharmonic(GridDomain::interval(10, 0.0, 1.0)), Error);
}

TEST(MixedFunctional, IdentityLambdaMatchesTridiagonalSolve) {
  const std::size_t nodes = 25;
  const auto dom = GridDomain::interval(nodes, 1.0, 0.5);
  const double h = dom.h();
  const auto rep = solve_mixed_functional(dom, 2.0, MixedLambda::identity());
  const std::size_t m = nodes - 2;
  Vec sub(m, -1.0 / h), diag(m, 2.0 / h + h), sup(m, -1.0 / h), rhs(m, 0.0);
  sub.front() = 0.0;
  sup.back() = 0.0;
  rhs.front() = 1.0 / h;
  rhs.back() = 0.5 / h;
  const Vec want = oracles::thomas(sub, diag, sup, rhs);
  for (std::size_t k = 0; k < m; ++k) EXPECT_NEAR(rep.minimizer[k + 1], want[k], 1e-8);
}

TEST(MixedFunctional, EmptyMaskReducesToDirichletEnergy) {
  const auto dom = GridDomain::interval(12, 0.0, 2.0);
  const auto rep = solve_mixed_functional(dom, 2.0, MixedLambda::mask(std::vector<bool>(12, false)));
  for (std::size_t x = 0; x < 12; ++x) EXPECT_NEAR(rep.minimizer[x], 2.0 * dom.coordinate(x)[0], 1e-9);
}

TEST(MaximalFunction, MatchesBruteForceBallAverages) {
  const auto dom = GridDomain::interval(9, 0.0, 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  Vec v(9);
  for (auto& x : v) x = ud(rng);
  const Vec got = maximal_function(v, dom);
  for (std::size_t i = 0; i < 9; ++i) {
    double best = 0.0;
    for (long r = 0; r <= 8; ++r) {
      double s = 0.0;
      int c = 0;
      for (long j = 0; j < 9; ++j)
        if (std::abs(j - static_cast<long>(i)) <= r) s += v[static_cast<std::size_t>(j)], ++c;
      best = std::max(best, s / c);
    }
    EXPECT_NEAR(got[i], best, 1e-14);
    EXPECT_GE(got[i], v[i]);
  }
  EXPECT_THROW(maximal_function(Vec(9, -1.0), dom), Error);
}

TEST(MaximalFunction, GradientRelationDominatesScalarGradient) {
  const auto dom = GridDomain::interval(8, 0.0, 1.0);
  const auto rel = maximal_gradient_relation(dom, 2.0);
  const auto base = scalar_gradient_relation(dom, 2.0);
  Vec u(8);
  for (std::size_t x = 0; x < 8; ++x) u[x] = std::sin(2.0 * static_cast<double>(x));
  const Vec g = minimal_gradient(rel, Element(rel.v_space(), u)).coords();
  const Vec g0 = minimal_gradient(base, Element(base.v_space(), u)).coords();
  for (std::size_t c = 0; c < g.size(); ++c) EXPECT_GE(g[c], g0[c] - 1e-14);
  EXPECT_LE(max_abs_diff(maximal_function(g0, GridDomain::interval(7, 0.0, 0.0)), g), 1e-14);
}
