#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gradspace/config.hpp"
#include "gradspace/core/relation.hpp"
#include "gradspace/engine/dykstra.hpp"
#include "gradspace/engine/psd.hpp"
#include "gradspace/matrix/symmetric.hpp"

namespace gradspace {

namespace detail {

inline engine::DykstraOptions matrix_dykstra_options(const SolverConfig& cfg) {
  engine::DykstraOptions opts;
  opts.max_cycles = std::min(cfg.max_iterations, 10000);
  opts.increment_tol = 1e-10;
  return opts;
}

/// An upper bound of psi1 and psi2: psi1 + psi2 + ||psi1|| I when that works
/// (always for PSD inputs), otherwise c I with c the larger top eigenvalue.
inline SymmetricMatrix upper_bound_hint(const SymmetricMatrix& psi1, const SymmetricMatrix& psi2) {
  const std::size_t n = psi1.size();
  const SymmetricMatrix hint = psi1 + psi2 + psi1.operator_norm() * SymmetricMatrix::identity(n);
  if (psd_geq(hint, psi1) && psd_geq(hint, psi2)) return hint;
  const double c = std::max(psi1.max_eigenvalue(), psi2.max_eigenvalue());
  return c * SymmetricMatrix::identity(n);
}

}  // namespace detail

/// Frobenius-minimal X with X >= psi1 and X >= psi2 (PSD order): the
/// projection of 0 onto the intersection of the two shifted cones.
inline SymmetricMatrix matrix_max(const SymmetricMatrix& psi1, const SymmetricMatrix& psi2, const SolverConfig& cfg = {}) {
  require_same_size(psi1.size(), psi2.size(), "matrix_max");
  const std::size_t n = psi1.size();
  const DenseMatrix a = psi1.matrix(), b = psi2.matrix();
  const std::vector<engine::ProjectionOracle> sets{
      [n, a](const Vec& x) { return engine::project_above(DenseMatrix(n, n, x), a).data(); },
      [n, b](const Vec& x) { return engine::project_above(DenseMatrix(n, n, x), b).data(); }};
  const auto r = engine::dykstra(sets, Vec(n * n, 0.0), detail::matrix_dykstra_options(cfg));
  SymmetricMatrix x(engine::symmetric_part(DenseMatrix(n, n, r.point)));
  // Close the remaining eigenvalue gap so both differences are PSD.
  const double gap = std::max({0.0, -(x - psi1).min_eigenvalue(), -(x - psi2).min_eigenvalue()});
  if (gap > 0.0) x = x + gap * SymmetricMatrix::identity(n);

  const SymmetricMatrix hint = detail::upper_bound_hint(psi1, psi2);
  if (x.frobenius() > hint.frobenius() * (1.0 + 1e-9) + 1e-12) {
    throw NonConvergence("matrix_max: result exceeds the norm of a known upper bound", x.coords(),
                         x.frobenius() - hint.frobenius(), r.cycles);
  }
  return x;
}

/// Frobenius-nearest point to matrix_max(psi1, psi2) in {0 <= V <= psi1, V <= psi2}.
inline SymmetricMatrix matrix_min(const SymmetricMatrix& psi1, const SymmetricMatrix& psi2, const SolverConfig& cfg = {}) {
  require_same_size(psi1.size(), psi2.size(), "matrix_min");
  require(is_psd(psi1) && is_psd(psi2), ErrorKind::precondition, "matrix_min needs positive semidefinite inputs");
  const std::size_t n = psi1.size();
  const DenseMatrix zero(n, n), a = psi1.matrix(), b = psi2.matrix();
  const std::vector<engine::ProjectionOracle> sets{
      [n, zero](const Vec& x) { return engine::project_above(DenseMatrix(n, n, x), zero).data(); },
      [n, a](const Vec& x) { return engine::project_below(DenseMatrix(n, n, x), a).data(); },
      [n, b](const Vec& x) { return engine::project_below(DenseMatrix(n, n, x), b).data(); }};
  const SymmetricMatrix top = matrix_max(psi1, psi2, cfg);
  const auto r = engine::dykstra(sets, top.coords(), detail::matrix_dykstra_options(cfg));
  return SymmetricMatrix(engine::symmetric_part(DenseMatrix(n, n, r.point)));
}

/// Linear relation A -> [A, delta] = A delta - delta A, Schatten-p on both sides.
inline GradientRelation commutator_relation(const SymmetricMatrix& delta, double p = 2.0) {
  const std::size_t n = delta.size();
  std::vector<SparseRow> rows(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (delta(k, j) != 0.0) rows[i * n + j].push_back({i * n + k, delta(k, j)});
        if (delta(i, k) != 0.0) rows[i * n + j].push_back({k * n + j, -delta(i, k)});
      }
  const auto space = matrix_space(n, NormSpec::schatten(p));
  return GradientRelation::linear_graph(SparseMatrix(n * n, n * n, rows), space, space);
}

/// Linear relation A -> A - M A / (2 ||M||_op); ||T(A)||_p >= ||A||_p / 2.
inline GradientRelation bounded_below_relation(const SymmetricMatrix& m, double p = 2.0) {
  const std::size_t n = m.size();
  const double op = m.operator_norm();
  require(op > 0.0, ErrorKind::precondition, "bounded_below_relation needs M != 0");
  const double c = 1.0 / (2.0 * op);
  std::vector<SparseRow> rows(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      rows[i * n + j].push_back({i * n + j, 1.0});
      for (std::size_t k = 0; k < n; ++k)
        if (m(i, k) != 0.0) rows[i * n + j].push_back({k * n + j, -c * m(i, k)});
    }
  const auto space = matrix_space(n, NormSpec::schatten(p));
  return GradientRelation::linear_graph(SparseMatrix(n * n, n * n, rows), space, space);
}

struct FredholmConstant {
  /// ||v|| <= constant ||F v|| on the orthogonal complement of the kernel.
  double constant = 0.0;
  std::vector<Vec> kernel;
  Vec singular_values;  // descending
  std::size_t rank = 0;
};

/// C = 1 / (smallest nonzero singular value) and a kernel basis, from the
/// eigendecomposition of F^T F. Eigenvalues <= 1e-10 * n * lambda_max count as zero.
inline FredholmConstant fredholm_poincare_constant(const DenseMatrix& f, double p = 2.0) {
  require(p == 2.0, ErrorKind::unsupported, "fredholm_poincare_constant supports p = 2 only");
  require(f.rows() >= 1 && f.cols() >= 1, ErrorKind::dimension, "fredholm_poincare_constant: empty matrix");
  require(all_finite(f.data()), ErrorKind::precondition, "fredholm_poincare_constant: entries must be finite");
  require(norm_inf(f.data()) > 0.0, ErrorKind::precondition, "F = 0 has no complement bound");
  const auto e = engine::jacobi_eigh(f.transpose() * f);
  const double threshold = 1e-10 * static_cast<double>(f.cols()) * e.values.back();
  FredholmConstant out;
  double smallest = 0.0;
  for (std::size_t k = 0; k < e.values.size(); ++k) {
    if (e.values[k] <= threshold) {
      Vec v(f.cols());
      for (std::size_t i = 0; i < f.cols(); ++i) v[i] = e.vectors(i, k);
      out.kernel.push_back(std::move(v));
    } else {
      if (out.rank == 0) smallest = e.values[k];
      ++out.rank;
    }
  }
  for (auto it = e.values.rbegin(); it != e.values.rend(); ++it) out.singular_values.push_back(std::sqrt(std::max(*it, 0.0)));
  out.constant = 1.0 / std::sqrt(smallest);
  return out;
}

/// v -> F v between Euclidean coordinate spaces.
inline GradientRelation fredholm_relation(const DenseMatrix& f) {
  return GradientRelation::linear_graph(SparseMatrix::from_dense(f),
                                        SpaceDescriptor(SpaceKind::euclidean_grid, f.cols(), NormSpec::euclidean()),
                                        SpaceDescriptor(SpaceKind::euclidean_grid, f.rows(), NormSpec::euclidean()));
}

/// Closure of the PSD order under Schatten limits: every A_i >= B and
/// ||limit - A_last||_p <= max_gap; true iff limit >= B up to the eigenvalue
/// slack plus that gap.
inline bool order_limit_check(const std::vector<SymmetricMatrix>& seq, const SymmetricMatrix& b,
                              const SymmetricMatrix& limit, double p = 2.0, double max_gap = 1e-6) {
  require(!seq.empty(), ErrorKind::precondition, "order_limit_check: empty sequence");
  for (std::size_t i = 0; i < seq.size(); ++i) {
    require_same_size(seq[i].size(), b.size(), "order_limit_check sequence");
    require(psd_geq(seq[i], b), ErrorKind::precondition,
            "order_limit_check: sequence element " + std::to_string(i) + " is not >= B");
  }
  require_same_size(limit.size(), b.size(), "order_limit_check limit");
  const SymmetricMatrix diff = limit - seq.back();
  const double gap = diff.frobenius() == 0.0 ? 0.0 : schatten_norm(diff, p);
  require(gap <= max_gap, ErrorKind::precondition, "order_limit_check: limit is not close to the last element");
  const SymmetricMatrix d = limit - b;
  return d.min_eigenvalue() >= -(engine::psd_slack(d.matrix()) + gap);
}

}  // namespace gradspace
