#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gradspace/core/gradient.hpp"
#include "gradspace/matrix.hpp"
#include "test_oracles.hpp"

using namespace gradspace;

namespace {

DenseMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  DenseMatrix a(n, n);
  for (auto& v : a.data()) v = nd(rng);
  return a;
}

// Orthonormal columns by modified Gram-Schmidt.
DenseMatrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  DenseMatrix q = random_matrix(n, rng);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d += q(i, j) * q(i, k);
      for (std::size_t i = 0; i < n; ++i) q(i, j) -= d * q(i, k);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += q(i, j) * q(i, j);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= std::sqrt(s);
  }
  return q;
}

SymmetricMatrix conjugate_diagonal(const DenseMatrix& q, const Vec& d) {
  DenseMatrix dm(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) dm(i, i) = d[i];
  return SymmetricMatrix(engine::symmetric_part(q * dm * q.transpose()));
}

SymmetricMatrix random_psd(std::size_t n, std::mt19937_64& rng) {
  const DenseMatrix c = random_matrix(n, rng);
  return SymmetricMatrix(engine::symmetric_part(c * c.transpose()));
}

double max_abs_diff(const Vec& a, const Vec& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

}  // namespace

TEST(SymmetricMatrix, RejectsAsymmetricInput) {
  EXPECT_THROW(SymmetricMatrix({{1.0, 2.0}, {0.0, 1.0}}), Error);
  EXPECT_THROW(SymmetricMatrix(DenseMatrix(2, 3)), Error);
  EXPECT_EQ(SymmetricMatrix::diagonal({1.0, 2.0}).eigenvalues(), (Vec{1.0, 2.0}));
}

TEST(SchattenNorm, EigenvalueFormula) {
  const SymmetricMatrix a = SymmetricMatrix::diagonal({3.0, -4.0});
  EXPECT_NEAR(schatten_norm(a, 2.0), 5.0, 1e-12);
  EXPECT_NEAR(schatten_norm(a, 3.0), std::cbrt(27.0 + 64.0), 1e-12);
  std::mt19937_64 rng(4);
  const DenseMatrix q = random_orthogonal(3, rng);
  EXPECT_NEAR(schatten_norm(conjugate_diagonal(q, {1.0, -2.0, 0.5}), 1.5),
              std::pow(1.0 + std::pow(2.0, 1.5) + std::pow(0.5, 1.5), 1.0 / 1.5), 1e-10);
}

TEST(SchattenNorm, MonotoneOnOrderedPsdPairs) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const SymmetricMatrix a = random_psd(3, rng);
    const SymmetricMatrix b = a + random_psd(3, rng);
    for (double p : {1.5, 2.0, 4.0}) EXPECT_LE(schatten_norm(a, p), schatten_norm(b, p) + 1e-9);
  }
}

TEST(PsdProjection, ComplementarityConditions) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix c = random_matrix(4, rng);
    const SymmetricMatrix a(engine::symmetric_part(c));
    const SymmetricMatrix x = psd_project(a);
    const SymmetricMatrix r = x - a;
    EXPECT_GE(x.min_eigenvalue(), -1e-10);
    EXPECT_GE(r.min_eigenvalue(), -1e-10);
    EXPECT_NEAR(dot(x.coords(), r.coords()), 0.0, 1e-9);
  }
}

TEST(MatrixMax, DiagonalPairGivesIdentity) {
  const auto m = matrix_max(SymmetricMatrix::diagonal({1.0, 0.0}), SymmetricMatrix::diagonal({0.0, 1.0}));
  EXPECT_LE(max_abs_diff(m.coords(), SymmetricMatrix::identity(2).coords()), 1e-6);
}

TEST(MatrixMax, CommutingPairGivesClampedEntrywiseMaximum) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    const DenseMatrix q = random_orthogonal(3, rng);
    Vec a(3), b(3), top(3);
    for (std::size_t i = 0; i < 3; ++i) {
      a[i] = nd(rng);
      b[i] = nd(rng);
      top[i] = std::max({a[i], b[i], 0.0});
    }
    const auto m = matrix_max(conjugate_diagonal(q, a), conjugate_diagonal(q, b));
    EXPECT_LE(max_abs_diff(m.coords(), conjugate_diagonal(q, top).coords()), 1e-6);
  }
}

TEST(MatrixMax, IncomparableUpperBoundWitness) {
  const double s5 = std::sqrt(5.0);
  const SymmetricMatrix w{{3.0, s5}, {s5, 3.0}};
  const SymmetricMatrix e1 = SymmetricMatrix::diagonal({1.0, 0.0}), e2 = SymmetricMatrix::diagonal({0.0, 1.0});
  EXPECT_TRUE(psd_geq(w, e1));
  EXPECT_TRUE(psd_geq(w, e2));
  const auto id = SymmetricMatrix::identity(2);
  EXPECT_FALSE(psd_geq(w, id));
  EXPECT_FALSE(psd_geq(id, w));
  const Vec ev = (w - id).eigenvalues();
  EXPECT_NEAR(ev[0], 2.0 - s5, 1e-9);
  EXPECT_NEAR(ev[1], 2.0 + s5, 1e-9);
}

TEST(MatrixMin, CommutingPsdPairGivesEntrywiseMinimum) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ud(0.0, 2.0);
  const DenseMatrix q = random_orthogonal(3, rng);
  Vec a(3), b(3), low(3);
  for (std::size_t i = 0; i < 3; ++i) {
    a[i] = ud(rng);
    b[i] = ud(rng);
    low[i] = std::min(a[i], b[i]);
  }
  const auto m = matrix_min(conjugate_diagonal(q, a), conjugate_diagonal(q, b));
  EXPECT_LE(max_abs_diff(m.coords(), conjugate_diagonal(q, low).coords()), 1e-6);
  EXPECT_THROW(matrix_min(SymmetricMatrix::diagonal({-1.0, 0.0}), SymmetricMatrix::identity(2)), Error);
}

TEST(Commutator, MatchesDenseProduct) {
  std::mt19937_64 rng(3);
  const SymmetricMatrix delta(engine::symmetric_part(random_matrix(3, rng)));
  const SymmetricMatrix a(engine::symmetric_part(random_matrix(3, rng)));
  const auto rel = commutator_relation(delta);
  const Vec got = minimal_gradient(rel, Element(rel.v_space(), a.coords())).coords();
  const DenseMatrix want = a.matrix() * delta.matrix() - delta.matrix() * a.matrix();
  EXPECT_LE(max_abs_diff(got, want.data()), 1e-12);
  const auto id = commutator_relation(SymmetricMatrix::identity(3));
  EXPECT_LE(norm_inf(minimal_gradient(id, Element(id.v_space(), a.coords())).coords()), 1e-14);
}

TEST(BoundedBelow, HalfNormLowerBound) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const SymmetricMatrix m(engine::symmetric_part(random_matrix(3, rng)));
    const SymmetricMatrix a(engine::symmetric_part(random_matrix(3, rng)));
    const auto rel = bounded_below_relation(m);
    const Vec t = minimal_gradient(rel, Element(rel.v_space(), a.coords())).coords();
    EXPECT_GE(schatten_norm(DenseMatrix(3, 3, t), 2.0), 0.5 * schatten_norm(a, 2.0) - 1e-12);
  }
  EXPECT_THROW(bounded_below_relation(SymmetricMatrix::zero(2)), Error);
}

TEST(Fredholm, KnownSingularValues) {
  std::mt19937_64 rng(15);
  const DenseMatrix u = random_orthogonal(5, rng), v = random_orthogonal(5, rng);
  DenseMatrix s(5, 5);
  s(0, 0) = 3.0;
  s(1, 1) = 2.0;
  s(2, 2) = 0.5;
  const DenseMatrix f = u * s * v.transpose();
  const auto fc = fredholm_poincare_constant(f);
  EXPECT_EQ(fc.rank, 3u);
  ASSERT_EQ(fc.kernel.size(), 2u);
  EXPECT_NEAR(fc.constant, 2.0, 1e-9);
  EXPECT_NEAR(fc.singular_values[0], 3.0, 1e-9);
  for (const auto& k : fc.kernel) {
    EXPECT_NEAR(std::sqrt(dot(k, k)), 1.0, 1e-9);
    EXPECT_LE(norm_inf((f * DenseMatrix(5, 1, k)).data()), 1e-9);
  }
  EXPECT_THROW(fredholm_poincare_constant(DenseMatrix(2, 2)), Error);
  EXPECT_THROW(fredholm_poincare_constant(f, 3.0), Error);
}

TEST(OrderLimit, ClosedUnderConvergentSequences) {
  const SymmetricMatrix b = SymmetricMatrix::diagonal({1.0, -1.0});
  std::vector<SymmetricMatrix> seq;
  for (int i = 1; i <= 8; ++i) seq.push_back(b + std::pow(10.0, -i) * SymmetricMatrix::identity(2));
  EXPECT_TRUE(order_limit_check(seq, b, b));
  EXPECT_THROW(order_limit_check(seq, b, b - 1e-3 * SymmetricMatrix::identity(2)), Error);
  EXPECT_THROW(order_limit_check({b - SymmetricMatrix::identity(2)}, b, b), Error);
}
