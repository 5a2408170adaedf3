#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <vector>

#include "gradspace/core/space.hpp"
#include "gradspace/engine/eigh.hpp"
#include "gradspace/engine/psd.hpp"
#include "gradspace/linalg.hpp"

namespace gradspace {

/// Real symmetric n x n matrix. Input symmetric to 1e-12 relative is accepted
/// and stored as its exact symmetric part.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const DenseMatrix& a) {
    require(a.rows() == a.cols(), ErrorKind::dimension, "symmetric matrix must be square");
    require(a.rows() >= 1, ErrorKind::precondition, "symmetric matrix must be nonempty");
    require(all_finite(a.data()), ErrorKind::precondition, "matrix entries must be finite");
    const double tol = 1e-12 * std::max(1.0, norm_inf(a.data()));
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = i + 1; j < a.cols(); ++j)
        require(std::abs(a(i, j) - a(j, i)) <= tol, ErrorKind::precondition, "matrix is not symmetric");
    a_ = engine::symmetric_part(a);
  }
  SymmetricMatrix(std::size_t n, Vec row_major) : SymmetricMatrix(DenseMatrix(n, n, std::move(row_major))) {}
  SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows) : SymmetricMatrix(from_rows(rows)) {}

  static SymmetricMatrix identity(std::size_t n) { return SymmetricMatrix(DenseMatrix::identity(n)); }
  static SymmetricMatrix zero(std::size_t n) { return SymmetricMatrix(DenseMatrix(n, n)); }
  static SymmetricMatrix diagonal(const Vec& d) {
    DenseMatrix a(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) a(i, i) = d[i];
    return SymmetricMatrix(a);
  }
  /// Coordinates of a matrix-space Element (row-major n^2 vector).
  static SymmetricMatrix from_coords(const Vec& x) { return SymmetricMatrix(matrix_side(x.size()), x); }

  std::size_t size() const noexcept { return a_.rows(); }
  const DenseMatrix& matrix() const noexcept { return a_; }
  const Vec& coords() const noexcept { return a_.data(); }
  double operator()(std::size_t i, std::size_t j) const { return a_(i, j); }

  engine::Eigh eigh() const { return engine::jacobi_eigh(a_); }
  Vec eigenvalues() const { return eigh().values; }
  double min_eigenvalue() const { return eigenvalues().front(); }
  double max_eigenvalue() const { return eigenvalues().back(); }
  double frobenius() const { return a_.frobenius(); }
  double operator_norm() const {
    const Vec ev = eigenvalues();
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
  }

  friend SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    return SymmetricMatrix(a.a_ + b.a_);
  }
  friend SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    return SymmetricMatrix(a.a_ - b.a_);
  }
  friend SymmetricMatrix operator*(double s, const SymmetricMatrix& a) { return SymmetricMatrix(s * a.a_); }

 private:
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n = rows.size();
    DenseMatrix a(n, n);
    std::size_t i = 0;
    for (const auto& r : rows) {
      require(r.size() == n, ErrorKind::dimension, "matrix rows must all have n entries");
      std::size_t j = 0;
      for (double v : r) a(i, j++) = v;
      ++i;
    }
    return a;
  }

  DenseMatrix a_;
};

/// Smallest eigenvalue >= -1e-9 (1 + ||A||_F).
inline bool is_psd(const SymmetricMatrix& a) { return a.min_eigenvalue() >= -engine::psd_slack(a.matrix()); }

/// a >= b in the PSD order, within the default eigenvalue slack.
inline bool psd_geq(const SymmetricMatrix& a, const SymmetricMatrix& b) { return is_psd(a - b); }

/// The n x n matrix space (n^2 row-major coordinates) with the given norm.
inline SpaceDescriptor matrix_space(std::size_t n, NormSpec norm = NormSpec::schatten(2.0)) {
  return SpaceDescriptor(SpaceKind::symmetric_matrix, n * n, std::move(norm));
}

/// (sum |lambda_i(A)|^p)^{1/p}
inline double schatten_norm(const SymmetricMatrix& a, double p) {
  require(std::isfinite(p) && p > 1.0, ErrorKind::precondition, "schatten exponent must satisfy 1 < p < infinity");
  double s = 0.0;
  for (double l : a.eigenvalues()) s += std::pow(std::abs(l), p);
  return std::pow(s, 1.0 / p);
}

/// Schatten norm of a general square matrix via its singular values.
inline double schatten_norm(const DenseMatrix& a, double p) {
  require(std::isfinite(p) && p > 1.0, ErrorKind::precondition, "schatten exponent must satisfy 1 < p < infinity");
  double s = 0.0;
  for (double sigma : engine::singular_values(a)) s += std::pow(sigma, p);
  return std::pow(s, 1.0 / p);
}

inline double operator_norm(const DenseMatrix& a) { return engine::singular_values(a).front(); }

/// Frobenius-nearest matrix X >= floor: floor + clip_+(A - floor).
inline SymmetricMatrix psd_project(const SymmetricMatrix& a, const SymmetricMatrix& floor) {
  require_same_size(a.size(), floor.size(), "psd_project");
  return SymmetricMatrix(engine::project_above(a.matrix(), floor.matrix()));
}

inline SymmetricMatrix psd_project(const SymmetricMatrix& a) { return psd_project(a, SymmetricMatrix::zero(a.size())); }

}  // namespace gradspace
