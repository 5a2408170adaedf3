#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "gradspace/linalg.hpp"

namespace gradspace::engine {

/// point -> nearest point of a fixed closed convex set (Euclidean metric on coordinates).
using ProjectionOracle = std::function<Vec(const Vec&)>;

struct DykstraOptions {
  int max_cycles = 10000;
  double increment_tol = 1e-10;
};

struct DykstraResult {
  Vec point;
  int cycles = 0;
  double last_increment = 0.0;
  /// ||x - P_i(x)|| for each set at the returned point.
  Vec set_distances;
  /// Sum over cycles of the squared per-set distances of the cycle-end iterate.
  double summed_distance2 = 0.0;
};

/// Dykstra's alternating projections: nearest point to `start` in the
/// intersection of the sets. With start = 0 this is the minimal-norm element.
inline DykstraResult dykstra(const std::vector<ProjectionOracle>& sets, const Vec& start,
                             const DykstraOptions& opts = {}) {
  require(!sets.empty(), ErrorKind::precondition, "dykstra: no sets");
  DykstraResult out;
  if (sets.size() == 1) {
    out.point = sets.front()(start);
    out.cycles = 1;
    out.set_distances = {0.0};
    return out;
  }

  const std::size_t m = sets.size();
  Vec x = start;
  std::vector<Vec> increments(m, Vec(start.size(), 0.0));
  for (int cycle = 1; cycle <= opts.max_cycles; ++cycle) {
    const Vec x_prev = x;
    for (std::size_t i = 0; i < m; ++i) {
      Vec shifted = x + increments[i];
      Vec projected = sets[i](shifted);
      increments[i] = shifted - projected;
      x = std::move(projected);
    }
    out.last_increment = distance2(x, x_prev);
    out.cycles = cycle;
    double dist2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = distance2(x, sets[i](x));
      dist2 += d * d;
    }
    out.summed_distance2 += dist2;
    if (out.last_increment <= opts.increment_tol * std::max(1.0, norm2(x)) &&
        std::sqrt(dist2) <= opts.increment_tol * std::max(1.0, norm2(x)) * 10.0) {
      break;
    }
  }
  out.point = x;
  out.set_distances.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.set_distances[i] = distance2(x, sets[i](x));
  const double worst = *std::max_element(out.set_distances.begin(), out.set_distances.end());
  if (out.cycles >= opts.max_cycles &&
      (out.last_increment > opts.increment_tol * std::max(1.0, norm2(x)) ||
       worst > std::sqrt(opts.increment_tol))) {
    throw NonConvergence("dykstra: cycle cap reached", x, std::max(out.last_increment, worst), out.cycles);
  }
  return out;
}

}  // namespace gradspace::engine
