#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "gradspace/linalg.hpp"

namespace gradspace::engine {

/// Eigendecomposition A = Q diag(values) Q^T, eigenvalues ascending, eigenvectors
/// stored as the columns of `vectors`.
struct Eigh {
  Vec values;
  DenseMatrix vectors;

  DenseMatrix reconstruct() const {
    const std::size_t n = values.size();
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += vectors(i, k) * values[k] * vectors(j, k);
        a(i, j) = s;
      }
    return a;
  }

  /// Q diag(fn(values)) Q^T; functional calculus on the spectrum.
  template <typename Fn>
  DenseMatrix apply_function(Fn&& fn) const {
    Eigh mapped{values, vectors};
    for (double& v : mapped.values) v = fn(v);
    return mapped.reconstruct();
  }
};

/// Cyclic Jacobi rotations to machine precision. The input must be symmetric;
/// only the upper triangle is read.
inline Eigh jacobi_eigh(const DenseMatrix& input) {
  require(input.rows() == input.cols(), ErrorKind::dimension, "jacobi_eigh: matrix not square");
  const std::size_t n = input.rows();
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = input(i, j);
  DenseMatrix q = DenseMatrix::identity(n);

  const double scale = std::max(a.frobenius(), std::numeric_limits<double>::min());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(2.0 * off) <= 1e-15 * scale) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apr = a(p, r);
        if (std::abs(apr) <= std::numeric_limits<double>::min()) continue;
        const double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akr = a(k, r);
          a(k, p) = c * akp - s * akr;
          a(k, r) = s * akp + c * akr;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double ark = a(r, k);
          a(p, k) = c * apk - s * ark;
          a(r, k) = s * apk + c * ark;
        }
        a(p, r) = a(r, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double qkp = q(k, p);
          const double qkr = q(k, r);
          q(k, p) = c * qkp - s * qkr;
          q(k, r) = s * qkp + c * qkr;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  Eigh out{Vec(n), DenseMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = q(i, order[k]);
  }
  return out;
}

inline double smallest_eigenvalue(const DenseMatrix& a) { return jacobi_eigh(a).values.front(); }

/// Singular values (descending) of a general matrix via the eigenvalues of A^T A.
inline Vec singular_values(const DenseMatrix& a) {
  const Eigh e = jacobi_eigh(a.transpose() * a);
  Vec s(e.values.rbegin(), e.values.rend());
  for (double& v : s) v = std::sqrt(std::max(v, 0.0));
  return s;
}

}  // namespace gradspace::engine
