#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gradspace/config.hpp"
#include "gradspace/engine/descent.hpp"
#include "gradspace/engine/dykstra.hpp"
#include "gradspace/linalg.hpp"

namespace gradspace::engine {

/// Quotient ||g_u||_W / ||u||_V over a closed cone. `energy` evaluates
/// ||g_u||_W^p_w and a (sub)gradient of it.
struct RayleighProblem {
  EnergyOracle energy;
  double p_w = 2.0;
  std::function<double(const Vec&)> norm_v;
  std::function<Vec(const Vec&)> norm_v_gradient;
  ProjectionOracle cone;
};

struct RayleighResult {
  Vec point;
  double value = 0.0;
  int iterations = 0;
};

inline double rayleigh_value(const RayleighProblem& prob, const Vec& u) {
  const double nv = prob.norm_v(u);
  require(nv > 0.0, ErrorKind::precondition, "rayleigh quotient of the zero element");
  return std::pow(std::max(prob.energy.value(u), 0.0), 1.0 / prob.p_w) / nv;
}

/// Normalised projected descent on the quotient: step along the negative
/// gradient, project onto the cone, renormalise to the unit V-sphere, and
/// backtrack until the quotient decreases.
inline RayleighResult rayleigh_iterate(const RayleighProblem& prob, const Vec& start, const SolverConfig& cfg) {
  auto normalise = [&](Vec u) {
    const double nv = prob.norm_v(u);
    if (!(nv > 0.0)) throw Error(ErrorKind::regularity, "rayleigh_iterate: iterate collapsed to zero on the cone");
    for (double& v : u) v /= nv;
    return u;
  };
  auto checked_value = [&](const Vec& u) {
    const double e = prob.energy.value(u);
    const double nv = prob.norm_v(u);
    const double r = std::pow(std::max(e, 0.0), 1.0 / prob.p_w) / nv;
    if (r <= 1e-13) {
      throw Error(ErrorKind::regularity, "rayleigh_iterate: found u != 0 with vanishing minimal gradient");
    }
    return r;
  };

  RayleighResult out;
  Vec u = normalise(prob.cone(start));
  double r = checked_value(u);
  double tau = 1.0;
  std::vector<double> window{r};
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const double e = prob.energy.value(u);
    const Vec ge = prob.energy.gradient(u);
    const double nv = prob.norm_v(u);
    const Vec gn = prob.norm_v_gradient(u);
    // grad of E^{1/p}/N
    const double coef = std::pow(std::max(e, 1e-300), 1.0 / prob.p_w - 1.0) / (prob.p_w * nv);
    Vec grad = scaled(coef, ge);
    axpy(-r / nv, gn, grad);

    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vec trial = u;
      axpy(-tau, grad, trial);
      Vec projected = prob.cone(trial);
      if (prob.norm_v(projected) <= 1e-300) {
        tau *= 0.5;
        continue;
      }
      projected = normalise(projected);
      const double rt = checked_value(projected);
      if (rt < r) {
        u = std::move(projected);
        r = rt;
        accepted = true;
        tau *= 1.5;
        break;
      }
      tau *= 0.5;
    }
    out.iterations = it;
    window.push_back(r);
    if (window.size() > 11) window.erase(window.begin());
    if (!accepted) break;
    if (window.size() == 11 && window.front() - window.back() <= cfg.tol_objective * r) break;
  }
  out.point = u;
  out.value = r;
  return out;
}

struct InverseIterationResult {
  Vec vector;
  double eigenvalue = 0.0;
  int iterations = 0;
};

/// Smallest eigenpair of A x = lambda M x (A SPD, M diagonal positive) by
/// inverse iteration; `solve` applies A^{-1}.
inline InverseIterationResult inverse_iteration(const LinearOperator& apply_a,
                                                const std::function<Vec(const Vec&)>& solve,
                                                const Vec& mass_diagonal, Vec start, const SolverConfig& cfg) {
  auto m_norm = [&](const Vec& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += mass_diagonal[i] * x[i] * x[i];
    return std::sqrt(s);
  };
  InverseIterationResult out;
  Vec x = std::move(start);
  double nx = m_norm(x);
  require(nx > 0.0, ErrorKind::precondition, "inverse_iteration: zero start vector");
  for (double& v : x) v /= nx;
  double lambda = dot(x, apply_a(x));
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    Vec mx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) mx[i] = mass_diagonal[i] * x[i];
    Vec y = solve(mx);
    nx = m_norm(y);
    require(nx > 0.0, ErrorKind::regularity, "inverse_iteration: solve returned zero");
    for (double& v : y) v /= nx;
    const double next = dot(y, apply_a(y));
    out.iterations = it;
    x = std::move(y);
    const bool done = std::abs(lambda - next) <= cfg.tol_objective * std::abs(next);
    lambda = next;
    if (done) break;
  }
  out.vector = std::move(x);
  out.eigenvalue = lambda;
  return out;
}

}  // namespace gradspace::engine
