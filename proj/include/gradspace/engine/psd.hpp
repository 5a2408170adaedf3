#pragma once

#include <algorithm>
#include <cmath>

#include "gradspace/engine/eigh.hpp"
#include "gradspace/linalg.hpp"

namespace gradspace::engine {

/// (A + A^T) / 2
inline DenseMatrix symmetric_part(const DenseMatrix& a) {
  require(a.rows() == a.cols(), ErrorKind::dimension, "symmetric_part: matrix not square");
  DenseMatrix s(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

/// Frobenius-nearest point of {X symmetric : X - floor is PSD}.
inline DenseMatrix project_above(const DenseMatrix& a, const DenseMatrix& floor) {
  const DenseMatrix d = symmetric_part(a) - floor;
  const auto e = jacobi_eigh(d);
  return floor + e.apply_function([](double l) { return std::max(l, 0.0); });
}

/// Frobenius-nearest point of {X symmetric : ceiling - X is PSD}.
inline DenseMatrix project_below(const DenseMatrix& a, const DenseMatrix& ceiling) {
  const DenseMatrix d = ceiling - symmetric_part(a);
  const auto e = jacobi_eigh(d);
  return ceiling - e.apply_function([](double l) { return std::max(l, 0.0); });
}

/// Default eigenvalue slack for PSD membership of a matrix of this size.
inline double psd_slack(const DenseMatrix& a) { return 1e-9 * (1.0 + a.frobenius()); }

}  // namespace gradspace::engine
