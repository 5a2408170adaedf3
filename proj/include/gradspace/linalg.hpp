#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gradspace/error.hpp"

namespace gradspace {

using Vec = std::vector<double>;

/// y -> A y for a linear operator given as a black box.
using LinearOperator = std::function<Vec(const Vec&)>;

inline void require_same_size(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw Error(ErrorKind::dimension,
                std::string(where) + ": size " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vec scaled(double alpha, const Vec& x) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = alpha * x[i];
  return y;
}

inline Vec operator+(const Vec& a, const Vec& b) {
  require_same_size(a.size(), b.size(), "vector add");
  Vec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

inline Vec operator-(const Vec& a, const Vec& b) {
  require_same_size(a.size(), b.size(), "vector subtract");
  Vec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

inline double distance2(const Vec& a, const Vec& b) {
  require_same_size(a.size(), b.size(), "distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

/// Dense row-major matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, Vec data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    require_same_size(data_.size(), rows * cols, "DenseMatrix data");
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const Vec& data() const noexcept { return data_; }
  Vec& data() noexcept { return data_; }

  Vec apply(const Vec& x) const {
    require_same_size(x.size(), cols_, "DenseMatrix::apply");
    Vec y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += data_[i * cols_ + j] * x[j];
      y[i] = s;
    }
    return y;
  }

  Vec apply_transpose(const Vec& x) const {
    require_same_size(x.size(), rows_, "DenseMatrix::apply_transpose");
    Vec y(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) y[j] += data_[i * cols_ + j] * x[i];
    return y;
  }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double frobenius() const { return norm2(data_); }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_size(a.cols_, b.rows_, "DenseMatrix product");
    DenseMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_size(a.rows_, b.rows_, "DenseMatrix add");
    require_same_size(a.cols_, b.cols_, "DenseMatrix add");
    return DenseMatrix(a.rows_, a.cols_, a.data_ + b.data_);
  }

  friend DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_size(a.rows_, b.rows_, "DenseMatrix subtract");
    require_same_size(a.cols_, b.cols_, "DenseMatrix subtract");
    return DenseMatrix(a.rows_, a.cols_, a.data_ - b.data_);
  }

  friend DenseMatrix operator*(double s, const DenseMatrix& a) {
    return DenseMatrix(a.rows_, a.cols_, scaled(s, a.data_));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

/// Sparse row: (column, coefficient) pairs.
using SparseRow = std::vector<std::pair<std::size_t, double>>;

inline double row_dot(const SparseRow& row, std::span<const double> x) {
  double s = 0.0;
  for (const auto& [j, a] : row) s += a * x[j];
  return s;
}

/// Compressed sparse row matrix. Duplicate entries are summed on construction.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  SparseMatrix(std::size_t rows, std::size_t cols, const std::vector<SparseRow>& row_entries)
      : rows_(rows), cols_(cols) {
    require_same_size(row_entries.size(), rows, "SparseMatrix rows");
    offsets_.reserve(rows + 1);
    for (const auto& r : row_entries) {
      SparseRow sorted = r;
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (sorted[k].first >= cols) throw Error(ErrorKind::dimension, "SparseMatrix column out of range");
        if (!index_.empty() && offsets_.back() < index_.size() && index_.back() == sorted[k].first) {
          value_.back() += sorted[k].second;
        } else {
          index_.push_back(sorted[k].first);
          value_.push_back(sorted[k].second);
        }
      }
      offsets_.push_back(index_.size());
    }
  }

  static SparseMatrix identity(std::size_t n) {
    std::vector<SparseRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = {{i, 1.0}};
    return SparseMatrix(n, n, rows);
  }

  static SparseMatrix from_dense(const DenseMatrix& m) {
    std::vector<SparseRow> rows(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(i, j) != 0.0) rows[i].push_back({j, m(i, j)});
    return SparseMatrix(m.rows(), m.cols(), rows);
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return value_.size(); }

  Vec apply(std::span<const double> x) const {
    require_same_size(x.size(), cols_, "SparseMatrix::apply");
    Vec y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) s += value_[k] * x[index_[k]];
      y[i] = s;
    }
    return y;
  }

  Vec apply_transpose(std::span<const double> y) const {
    require_same_size(y.size(), rows_, "SparseMatrix::apply_transpose");
    Vec x(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) x[index_[k]] += value_[k] * y[i];
    return x;
  }

  SparseRow row(std::size_t i) const {
    SparseRow r;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) r.push_back({index_[k], value_[k]});
    return r;
  }

  DenseMatrix to_dense() const {
    DenseMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) m(i, index_[k]) += value_[k];
    return m;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> index_;
  Vec value_;
};

}  // namespace gradspace
