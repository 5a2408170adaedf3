#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gradspace/engine/separable.hpp"
#include "gradspace/error.hpp"
#include "gradspace/linalg.hpp"

namespace gradspace::engine {

struct InteriorOptions {
  double tol = 1e-11;
  int max_iterations = 200;
};

struct InteriorSolution {
  Vec x;
  Vec multipliers;
  int iterations = 0;
  double residual = 0.0;
};

namespace detail {

/// In-place Cholesky of a dense SPD matrix (lower triangle), then solve. Each
/// pivot is floored relative to its own diagonal entry to keep null directions
/// of the barrier Hessian solvable.
inline Vec cholesky_solve(std::vector<double>& a, std::size_t n, Vec b) {
  double diag_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag_max = std::max(diag_max, a[i * n + i]);
  const double tiny = std::max(1e-200 * diag_max, 1e-300);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    const double floor = std::max(1e-14 * d, tiny);
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    d = std::sqrt(std::max(d, floor));
    a[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= a[i * n + k] * b[k];
    b[i] /= a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= a[k * n + i] * b[k];
    b[i] /= a[i * n + i];
  }
  return b;
}

inline double term_gradient(const SeparableTerm& t, double x) {
  switch (t.kind) {
    case SeparableTerm::Kind::quadratic: return t.weight * (x - t.center);
    case SeparableTerm::Kind::power:
    case SeparableTerm::Kind::power_nonneg:
      if (t.weight == 0.0 || x == 0.0) return 0.0;
      return t.p * t.weight * std::pow(std::abs(x), t.p - 1.0) * (x < 0 ? -1.0 : 1.0);
  }
  return 0.0;
}

inline double term_curvature(const SeparableTerm& t, double x) {
  switch (t.kind) {
    case SeparableTerm::Kind::quadratic: return t.weight;
    case SeparableTerm::Kind::power:
    case SeparableTerm::Kind::power_nonneg:
      if (t.weight == 0.0) return 0.0;
      return std::min(t.p * (t.p - 1.0) * t.weight * std::pow(std::max(std::abs(x), 1e-150), t.p - 2.0), 1e150);
  }
  return 0.0;
}

}  // namespace detail

/// Infeasible-start primal-dual interior point method for a separable convex
/// program with linear inequalities. power_nonneg variables stay strictly
/// positive; zero-weight terms are allowed (pure constraint variables).
inline InteriorSolution solve_separable_interior(const SeparableProgram& prog, Vec start,
                                                 const InteriorOptions& opts = {}) {
  const std::size_t n = prog.terms.size();
  const std::size_t m = prog.constraints.size();
  require_same_size(start.size(), n, "solve_separable_interior start");
  std::vector<bool> positive(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    positive[i] = prog.terms[i].kind == SeparableTerm::Kind::power_nonneg;
    if (positive[i] && !(start[i] > 0.0)) start[i] = 1.0;
  }
  Vec x = std::move(start);
  Vec w(m), y(m, 1.0);
  double bscale = 1.0;
  for (std::size_t k = 0; k < m; ++k) {
    w[k] = std::max(row_dot(prog.constraints[k].row, x) - prog.constraints[k].rhs, 1.0);
    bscale = std::max(bscale, std::abs(prog.constraints[k].rhs));
  }

  InteriorSolution out;
  std::vector<double> normal(n * n);
  for (int it = 1; it <= opts.max_iterations; ++it) {
    Vec grad(n), rd(n), rp(m);
    for (std::size_t i = 0; i < n; ++i) grad[i] = detail::term_gradient(prog.terms[i], x[i]);
    rd = grad;
    for (std::size_t k = 0; k < m; ++k) {
      const auto& c = prog.constraints[k];
      for (const auto& [j, a] : c.row) rd[j] -= a * y[k];
      rp[k] = row_dot(c.row, x) - w[k] - c.rhs;
    }
    const double mu = dot(w, y) / static_cast<double>(std::max<std::size_t>(m, 1));
    const double gscale = 1.0 + norm_inf(grad);
    out.residual = std::max({norm_inf(rd) / gscale, norm_inf(rp) / bscale, mu / gscale});
    out.iterations = it;
    if (out.residual <= opts.tol) break;
    if (it == opts.max_iterations) {
      throw NonConvergence("interior point: iteration cap reached", x, out.residual, it);
    }

    const double sigma = 0.1;
    std::fill(normal.begin(), normal.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) normal[i * n + i] = detail::term_curvature(prog.terms[i], x[i]);
    Vec rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -rd[i];
    Vec d(m);
    for (std::size_t k = 0; k < m; ++k) {
      d[k] = y[k] / w[k];
      const auto& row = prog.constraints[k].row;
      const double coeff = -d[k] * rp[k] + sigma * mu / w[k] - y[k];
      for (const auto& [i, a] : row) {
        rhs[i] += a * coeff;
        for (const auto& [j, b] : row) normal[i * n + j] += d[k] * a * b;
      }
    }
    const Vec dx = detail::cholesky_solve(normal, n, rhs);
    Vec dy(m), dw(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double adx = row_dot(prog.constraints[k].row, dx);
      dy[k] = d[k] * (-rp[k] - adx) + sigma * mu / w[k] - y[k];
      dw[k] = (sigma * mu - w[k] * y[k] - w[k] * dy[k]) / y[k];
    }

    double alpha = 1.0;
    const auto limit = [&alpha](double v, double dv) {
      if (dv < 0.0) alpha = std::min(alpha, -0.995 * v / dv);
    };
    for (std::size_t k = 0; k < m; ++k) {
      limit(w[k], dw[k]);
      limit(y[k], dy[k]);
    }
    for (std::size_t i = 0; i < n; ++i)
      if (positive[i]) limit(x[i], dx[i]);
    axpy(alpha, dx, x);
    axpy(alpha, dw, w);
    axpy(alpha, dy, y);
  }
  out.x = std::move(x);
  out.multipliers = std::move(y);
  return out;
}

}  // namespace gradspace::engine
