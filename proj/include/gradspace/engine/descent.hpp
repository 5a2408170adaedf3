#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <vector>

#include "gradspace/config.hpp"
#include "gradspace/engine/dykstra.hpp"
#include "gradspace/linalg.hpp"

namespace gradspace::engine {

/// Convex energy with a (sub)gradient.
struct EnergyOracle {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

struct DescentOptions {
  double initial_lipschitz = 1.0;
  /// Record the objective at every accepted iterate.
  bool record_history = false;
  /// Step residual required for convergence; 0 means tol_objective.
  double step_tol = 0.0;
};

struct DescentResult {
  Vec point;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Infinity norm of the last prox-gradient step, relative to 1 + ||x||_inf.
  double step_residual = 0.0;
  double lipschitz = 0.0;
  std::vector<double> history;
};

/// Largest eigenvalue of a symmetric PSD operator by power iteration, with a
/// deterministic start vector. Used to seed step sizes.
inline double power_iteration(const LinearOperator& apply_a, std::size_t n, int iterations = 60) {
  if (n == 0) return 0.0;
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  double lambda = 0.0;
  for (int k = 0; k < iterations; ++k) {
    const double nx = norm2(x);
    if (nx == 0.0) return 0.0;
    for (double& v : x) v /= nx;
    Vec y = apply_a(x);
    lambda = dot(x, y);
    x = std::move(y);
  }
  return lambda;
}

/// Monotone accelerated projected gradient (FISTA with backtracking and
/// gradient-based restart). Converged when the relative objective decrease over
/// the last 10 iterations is <= tol_objective and the prox-gradient step is
/// below step_tol relative to the iterate, or when steps from the current
/// iterate stop decreasing the objective in floating point.
inline DescentResult projected_descent(const EnergyOracle& energy, const ProjectionOracle& feasible,
                                       const Vec& start, const SolverConfig& cfg,
                                       const DescentOptions& opts = {}) {
  DescentResult out;
  Vec x = feasible(start);
  double fx = energy.value(x);
  Vec y = x;
  double fy = fx;
  double t = 1.0;
  double lip = std::max(opts.initial_lipschitz, 1e-12);
  std::vector<double> window{fx};
  int stalls = 0;
  if (opts.record_history) out.history.push_back(fx);
  const double step_tol = opts.step_tol > 0.0 ? opts.step_tol : cfg.tol_objective;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const Vec g = energy.gradient(y);
    Vec z;
    double fz = 0.0;
    for (int bt = 0; bt < 80; ++bt) {
      Vec trial = y;
      axpy(-1.0 / lip, g, trial);
      z = feasible(trial);
      fz = energy.value(z);
      const Vec d = z - y;
      const double model = fy + dot(g, d) + 0.5 * lip * dot(d, d);
      if (fz <= model + 1e-14 * std::abs(fy) || !std::isfinite(lip)) break;
      lip *= 2.0;
    }

    const Vec step = z - y;
    out.step_residual = norm_inf(step) / (1.0 + norm_inf(z));

    Vec x_next;
    double fx_next;
    bool restart = false;
    const bool from_x = y == x;
    if (fz <= fx) {
      x_next = z;
      fx_next = fz;
      // Restart momentum when it points uphill.
      if (dot(y - z, z - x) > 0.0) restart = true;
    } else {
      x_next = x;
      fx_next = fx;
      restart = true;
    }
    stalls = (from_x && !(fz < fx)) ? stalls + 1 : 0;

    const double t_next = restart ? 1.0 : 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (restart) {
      y = x_next;
    } else {
      y = x_next;
      axpy((t - 1.0) / t_next, x_next - x, y);
    }
    t = t_next;
    x = std::move(x_next);
    fx = fx_next;
    fy = energy.value(y);
    lip = std::max(lip * 0.95, 1e-12);

    if (opts.record_history) out.history.push_back(fx);
    window.push_back(fx);
    if (window.size() > 11) window.erase(window.begin());

    if (norm_inf(x) > cfg.iterate_cap) {
      throw NonConvergence("projected_descent: iterate norm exceeded cap (unbounded minimizing sequence?)", x,
                           norm_inf(x), it);
    }

    out.iterations = it;
    if (window.size() == 11) {
      const double decrease = window.front() - window.back();
      const double scale = std::max(std::abs(window.back()), 1e-300);
      if (decrease <= cfg.tol_objective * scale && out.step_residual <= step_tol) {
        out.converged = true;
        break;
      }
    }
    // No descent from x itself: the objective is resolved to rounding.
    if (stalls >= 3 && out.step_residual <= std::sqrt(cfg.tol_objective)) {
      out.converged = true;
      break;
    }
    if (fx == 0.0 && out.step_residual == 0.0) {
      out.converged = true;
      break;
    }
  }
  out.point = x;
  out.value = fx;
  out.lipschitz = lip;
  if (!out.converged) {
    throw NonConvergence("projected_descent: iteration cap reached", out.point, out.step_residual, out.iterations);
  }
  return out;
}

/// Projected gradient steps x <- P(x - grad/L) from a converged descent point,
/// kept while the step residual decreases; L doubles after a failed step.
/// Resolves the minimizer past the point where objective values stop
/// separating iterates.
inline Vec refine_stationarity(const EnergyOracle& energy, const ProjectionOracle& feasible, Vec x,
                               double lipschitz, double step_tol, int max_iterations) {
  auto step_from = [&](const Vec& u) {
    Vec trial = u;
    axpy(-1.0 / lipschitz, energy.gradient(u), trial);
    return feasible(trial);
  };
  // Gradient-mapping size in units of the initial step.
  const double l0 = lipschitz;
  auto residual = [&](const Vec& from, const Vec& to) {
    return lipschitz / l0 * norm_inf(to - from) / (1.0 + norm_inf(to));
  };
  Vec next = step_from(x);
  double res = residual(x, next);
  int failures = 0;
  for (int it = 0; it < max_iterations && res > step_tol && failures < 30; ++it) {
    Vec after = step_from(next);
    const double next_res = residual(next, after);
    if (next_res < res) {
      x = std::move(next);
      next = std::move(after);
      res = next_res;
      failures = 0;
    } else {
      lipschitz *= 2.0;
      next = step_from(x);
      res = residual(x, next);
      ++failures;
    }
  }
  return x;
}

}  // namespace gradspace::engine
