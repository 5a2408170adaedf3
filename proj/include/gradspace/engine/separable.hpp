#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "gradspace/config.hpp"
#include "gradspace/linalg.hpp"

namespace gradspace::engine {

/// One coordinate's cost in a separable program.
struct SeparableTerm {
  enum class Kind {
    power,           // weight * |x|^p
    power_nonneg,    // weight * x^p on x >= 0
    quadratic,       // weight / 2 * (x - center)^2
  };
  Kind kind = Kind::quadratic;
  double weight = 1.0;
  double p = 2.0;
  double center = 0.0;

  /// argmin_x cost(x) - s x
  double response(double s) const {
    switch (kind) {
      case Kind::quadratic: return center + s / weight;
      case Kind::power: {
        const double m = std::pow(std::abs(s) / (p * weight), 1.0 / (p - 1.0));
        return s < 0 ? -m : m;
      }
      case Kind::power_nonneg:
        return s <= 0.0 ? 0.0 : std::pow(s / (p * weight), 1.0 / (p - 1.0));
    }
    return 0.0;
  }

  double cost(double x) const {
    switch (kind) {
      case Kind::quadratic: return 0.5 * weight * (x - center) * (x - center);
      case Kind::power:
      case Kind::power_nonneg: return weight * std::pow(std::abs(x), p);
    }
    return 0.0;
  }
};

/// row . x >= rhs
struct LinearInequality {
  SparseRow row;
  double rhs = 0.0;
};

struct SeparableProgram {
  std::vector<SeparableTerm> terms;
  std::vector<LinearInequality> constraints;

  double objective(const Vec& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) s += terms[i].cost(x[i]);
    return s;
  }

  double max_violation(const Vec& x) const {
    double v = 0.0;
    for (const auto& c : constraints) v = std::max(v, c.rhs - row_dot(c.row, x));
    return v;
  }
};

struct SeparableSolution {
  Vec x;
  Vec multipliers;
  int sweeps = 0;
  double max_violation = 0.0;
};

struct SeparableOptions {
  double violation_tol = 1e-12;
  int max_sweeps = 200000;
};

/// Exact cyclic dual coordinate ascent (Hildreth's method generalised to
/// separable strictly convex costs). Each sweep maximises the dual over one
/// multiplier at a time by a safeguarded 1-D root find, so every visited
/// constraint is either tight or inactive after its update.
inline SeparableSolution solve_separable(const SeparableProgram& prog, const SeparableOptions& opts = {},
                                         std::optional<Vec> warm_multipliers = std::nullopt) {
  const std::size_t n = prog.terms.size();
  const std::size_t m = prog.constraints.size();
  for (const auto& c : prog.constraints)
    for (const auto& [j, a] : c.row) require(j < n, ErrorKind::dimension, "solve_separable: column out of range");

  Vec lambda = warm_multipliers.value_or(Vec(m, 0.0));
  require_same_size(lambda.size(), m, "solve_separable multipliers");
  Vec s(n, 0.0);
  for (std::size_t k = 0; k < m; ++k)
    for (const auto& [j, a] : prog.constraints[k].row) s[j] += lambda[k] * a;
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = prog.terms[i].response(s[i]);

  SeparableSolution out;
  auto residual_at = [&](const LinearInequality& c, double delta) {
    double r = -c.rhs;
    for (const auto& [j, a] : c.row) r += a * prog.terms[j].response(s[j] + a * delta);
    return r;
  };

  double best_violation = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    double max_move = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const auto& c = prog.constraints[k];
      if (c.row.empty()) continue;
      const double lo0 = -lambda[k];
      double delta;
      if (residual_at(c, lo0) >= 0.0) {
        delta = lo0;
      } else if (residual_at(c, 0.0) >= 0.0) {
        // Root in [lo0, 0].
        double lo = lo0, hi = 0.0;
        for (int b = 0; b < 200 && hi - lo > 1e-300; ++b) {
          const double mid = 0.5 * (lo + hi);
          if (mid == lo || mid == hi) break;
          (residual_at(c, mid) >= 0.0 ? hi : lo) = mid;
        }
        delta = hi;
      } else {
        double lo = 0.0, hi = 1.0;
        double lambda_scale = std::max(1e-12, std::abs(lambda[k]));
        hi = lambda_scale;
        int grow = 0;
        while (residual_at(c, hi) < 0.0) {
          lo = hi;
          hi *= 2.0;
          if (++grow > 2000 || !std::isfinite(hi)) {
            throw Error(ErrorKind::infeasible, "solve_separable: constraint cannot be satisfied");
          }
        }
        for (int b = 0; b < 200; ++b) {
          const double mid = 0.5 * (lo + hi);
          if (mid == lo || mid == hi) break;
          (residual_at(c, mid) >= 0.0 ? hi : lo) = mid;
        }
        delta = hi;
      }
      if (delta != 0.0) {
        lambda[k] += delta;
        if (lambda[k] < 0.0) lambda[k] = 0.0;
        for (const auto& [j, a] : c.row) {
          s[j] += a * delta;
          const double xj = prog.terms[j].response(s[j]);
          max_move = std::max(max_move, std::abs(xj - x[j]));
          x[j] = xj;
        }
      }
    }
    out.sweeps = sweep;
    out.max_violation = prog.max_violation(x);
    if (out.max_violation <= opts.violation_tol && max_move <= opts.violation_tol) break;
    // Rounding cycle near the tolerance: the sweeps have stopped making progress.
    if (out.max_violation < best_violation) {
      best_violation = out.max_violation;
      stalled = 0;
    } else if (++stalled >= 200 && out.max_violation <= 1e3 * opts.violation_tol) {
      break;
    }
    if (sweep == opts.max_sweeps) {
      throw NonConvergence("solve_separable: sweep cap reached", x, out.max_violation, sweep);
    }
  }
  out.x = std::move(x);
  out.multipliers = std::move(lambda);
  return out;
}

}  // namespace gradspace::engine
