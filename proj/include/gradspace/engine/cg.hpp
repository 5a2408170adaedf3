#pragma once

#include <cmath>
#include <optional>

#include "gradspace/config.hpp"
#include "gradspace/linalg.hpp"

namespace gradspace::engine {

struct CgResult {
  Vec x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Conjugate gradients for an operator that is symmetric positive definite on
/// the subspace the iterates live in. Stops when ||Ax - b|| <= rel_tol * ||b||.
inline CgResult cg_solve(const LinearOperator& apply_a, const Vec& b, const SolverConfig& cfg,
                         std::optional<Vec> x0 = std::nullopt, std::optional<double> rel_tol = std::nullopt) {
  const double tol = rel_tol.value_or(cfg.tol_objective);
  const double bnorm = norm2(b);
  CgResult out;
  out.x = x0.value_or(Vec(b.size(), 0.0));
  require_same_size(out.x.size(), b.size(), "cg_solve start");
  if (bnorm == 0.0 && !x0) return out;

  Vec r = b - apply_a(out.x);
  Vec p = r;
  double rr = dot(r, r);
  const double target = tol * (bnorm > 0 ? bnorm : 1.0);
  for (int it = 0; it < cfg.max_iterations; ++it) {
    out.relative_residual = std::sqrt(rr) / (bnorm > 0 ? bnorm : 1.0);
    if (std::sqrt(rr) <= target) {
      out.iterations = it;
      return out;
    }
    const Vec ap = apply_a(p);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) {
      throw Error(ErrorKind::precondition, "cg_solve: operator not positive definite (p^T A p <= 0)");
    }
    const double alpha = rr / pap;
    axpy(alpha, p, out.x);
    axpy(-alpha, ap, r);
    // Recompute the true residual occasionally to bound drift.
    if ((it + 1) % 200 == 0) r = b - apply_a(out.x);
    const double rr_next = dot(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
  }
  out.iterations = cfg.max_iterations;
  out.relative_residual = std::sqrt(rr) / (bnorm > 0 ? bnorm : 1.0);
  if (std::sqrt(rr) > target) {
    throw NonConvergence("cg_solve: iteration cap reached", out.x, out.relative_residual, cfg.max_iterations);
  }
  return out;
}

}  // namespace gradspace::engine
