#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "gradspace/config.hpp"
#include "gradspace/core/relation.hpp"
#include "gradspace/core/space.hpp"
#include "gradspace/engine/interior.hpp"
#include "gradspace/engine/separable.hpp"

namespace gradspace {

namespace detail {

inline void check_dims(const GradientRelation& rel, std::size_t u_dim, std::optional<std::size_t> g_dim) {
  if (u_dim != rel.v_space().dimension) {
    throw Error(ErrorKind::dimension, "u has " + std::to_string(u_dim) + " coordinates, relation expects " +
                                          std::to_string(rel.v_space().dimension));
  }
  if (g_dim && *g_dim != rel.w_space().dimension) {
    throw Error(ErrorKind::dimension, "g has " + std::to_string(*g_dim) + " coordinates, relation expects " +
                                          std::to_string(rel.w_space().dimension));
  }
}

inline Vec envelope_floor(const GradientRelation::Envelope& env, const Vec& u) {
  Vec f(env.groups.size(), 0.0);
  for (std::size_t i = 0; i < env.groups.size(); ++i) {
    double acc = 0.0;
    for (const auto& row : env.groups[i]) {
      const double v = row_dot(row, u);
      if (env.combine == GradientRelation::Envelope::Combine::max_abs) {
        acc = std::max(acc, std::abs(v));
      } else {
        acc += v * v;
      }
    }
    f[i] = env.combine == GradientRelation::Envelope::Combine::max_abs ? acc : std::sqrt(acc);
  }
  if (env.maximal) return env.maximal->apply(f);
  return f;
}

}  // namespace detail

/// Minimal gradient of an inequality-type relation together with the dual
/// multipliers of its constraints (one per system constraint).
struct PolyhedralGradient {
  Vec gradient;
  Vec multipliers;
  int sweeps = 0;
};

/// min ||g||_W^p over g >= 0 with g_row . g >= sum |form . u| for every constraint.
inline PolyhedralGradient polyhedral_minimal_gradient(const PolyhedralSystem& sys, const NormSpec& w_norm, const Vec& u,
                                                      const SolverConfig& cfg) {
  require(w_norm.is_coordinatewise(), ErrorKind::precondition, "polyhedral relations need a coordinatewise W norm");
  require_same_size(u.size(), sys.v_dim, "polyhedral_minimal_gradient u");
  engine::SeparableProgram prog;
  prog.terms.resize(sys.w_dim);
  for (std::size_t i = 0; i < sys.w_dim; ++i) {
    prog.terms[i] = {engine::SeparableTerm::Kind::power_nonneg, w_norm.coordinate_weight(i), w_norm.p(), 0.0};
  }
  std::vector<std::size_t> active;
  double max_rhs = 0.0;
  for (std::size_t k = 0; k < sys.constraints.size(); ++k) {
    const double rhs = sys.constraints[k].rhs(u);
    if (rhs <= 0.0) continue;
    active.push_back(k);
    max_rhs = std::max(max_rhs, rhs);
    prog.constraints.push_back({sys.constraints[k].g_row, rhs});
  }

  PolyhedralGradient out;
  out.gradient.assign(sys.w_dim, 0.0);
  out.multipliers.assign(sys.constraints.size(), 0.0);
  if (active.empty()) return out;

  // Small systems: interior point on data scaled to unit size.
  if (sys.w_dim <= 400 && prog.constraints.size() <= 20000) {
    engine::SeparableProgram scaled_prog = prog;
    for (auto& c : scaled_prog.constraints) c.rhs /= max_rhs;
    Vec start(sys.w_dim, 1.0);
    if (cfg.seed != 0) {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> unif(0.5, 1.5);
      for (double& v : start) v = unif(rng);
    }
    engine::InteriorOptions iopts;
    iopts.tol = std::min(1e-12, cfg.tol_objective);
    try {
      auto sol = engine::solve_separable_interior(scaled_prog, std::move(start), iopts);
      double lift = 0.0;
      for (const auto& c : scaled_prog.constraints) {
        const double lhs = row_dot(c.row, sol.x);
        if (lhs < c.rhs && lhs > 0.0) lift = std::max(lift, c.rhs / lhs - 1.0);
      }
      for (double& v : sol.x) v = std::max(v, 0.0) * (1.0 + lift) * max_rhs;
      if (prog.max_violation(sol.x) <= 1e-12 * max_rhs) {
        out.gradient = std::move(sol.x);
        const double dual_scale = std::pow(max_rhs, w_norm.p() - 1.0);
        for (std::size_t a = 0; a < active.size(); ++a) out.multipliers[active[a]] = sol.multipliers[a] * dual_scale;
        out.sweeps = sol.iterations;
        return out;
      }
    } catch (const NonConvergence&) {
    }
  }

  std::optional<Vec> warm;
  if (cfg.seed != 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vec w(prog.constraints.size());
    for (double& v : w) v = unif(rng) * std::pow(max_rhs, w_norm.p() - 1.0);
    warm = std::move(w);
  }
  engine::SeparableOptions opts;
  opts.violation_tol = std::max(1e-12 * max_rhs, 1e-300);
  opts.max_sweeps = std::max(cfg.max_iterations, 1000);
  auto sol = engine::solve_separable(prog, opts, warm);

  // Rescale so every constraint holds exactly (all g_row coefficients are nonnegative).
  double lift = 0.0;
  for (const auto& c : prog.constraints) {
    const double lhs = row_dot(c.row, sol.x);
    if (lhs < c.rhs) {
      require(lhs > 0.0, ErrorKind::nonconvergence, "polyhedral_minimal_gradient: unresolved constraint");
      lift = std::max(lift, c.rhs / lhs - 1.0);
    }
  }
  for (double& v : sol.x) v = std::max(v, 0.0) * (1.0 + lift) * (1.0 + (lift > 0 ? 1e-15 : 0.0));
  out.gradient = std::move(sol.x);
  for (std::size_t a = 0; a < active.size(); ++a) out.multipliers[active[a]] = sol.multipliers[a];
  out.sweeps = sol.sweeps;
  return out;
}

/// True iff (u, g) satisfies the relation's defining constraints within tol.
inline bool check_gradient_pair(const GradientRelation& rel, const Element& u, const Element& g, double tol) {
  detail::check_dims(rel, u.size(), g.size());
  const auto& payload = rel.payload();
  if (const auto* lin = std::get_if<GradientRelation::LinearGraph>(&payload)) {
    return rel.w_space().norm.norm(lin->map.apply(u.coords()) - g.coords()) <= tol;
  }
  if (const auto* env = std::get_if<GradientRelation::Envelope>(&payload)) {
    const Vec floor = detail::envelope_floor(*env, u.coords());
    for (std::size_t i = 0; i < floor.size(); ++i)
      if (g[i] < floor[i] - tol) return false;
    return true;
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i] < -tol) return false;
  const auto sys = to_polyhedral(rel);
  for (const auto& c : sys->constraints)
    if (c.lhs(g.coords()) < c.rhs(u.coords()) - tol) return false;
  return true;
}

/// The unique norm-minimal gradient of u.
inline Element minimal_gradient(const GradientRelation& rel, const Element& u, const SolverConfig& cfg = {}) {
  detail::check_dims(rel, u.size(), std::nullopt);
  const auto& payload = rel.payload();
  if (const auto* lin = std::get_if<GradientRelation::LinearGraph>(&payload)) {
    return Element(rel.w_space(), lin->map.apply(u.coords()));
  }
  if (const auto* env = std::get_if<GradientRelation::Envelope>(&payload)) {
    return Element(rel.w_space(), detail::envelope_floor(*env, u.coords()));
  }
  if (const auto* ge = std::get_if<GradientRelation::GraphEdge>(&payload)) {
    Vec g(rel.w_space().dimension, 0.0);
    const auto& edges = ge->graph.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) g[e] = std::abs(u[edges[e].from] - u[edges[e].to]) / edges[e].length;
    return Element(rel.w_space(), std::move(g));
  }
  cfg.validate();
  const auto sys = to_polyhedral(rel);
  return Element(rel.w_space(), polyhedral_minimal_gradient(*sys, rel.w_space().norm, u.coords(), cfg).gradient);
}

/// ||u||_V + ||g_u||_W
inline double sobolev_norm(const GradientRelation& rel, const Element& u, const SolverConfig& cfg = {}) {
  return rel.v_space().norm.norm(u.coords()) + rel.w_space().norm.norm(minimal_gradient(rel, u, cfg).coords());
}

/// Positive homogeneity of the minimal gradient: g_{alpha u} = alpha g_u.
inline bool scale_gradient_check(const GradientRelation& rel, const Element& u, double alpha, const SolverConfig& cfg) {
  require(alpha >= 0.0, ErrorKind::precondition, "scale_gradient_check: alpha must be >= 0");
  const Element scaled_u(u.space(), scaled(alpha, u.coords()));
  const Vec lhs = minimal_gradient(rel, scaled_u, cfg).coords();
  const Vec rhs = scaled(alpha, minimal_gradient(rel, u, cfg).coords());
  return rel.w_space().norm.norm(lhs - rhs) <= cfg.tol_objective;
}

struct PoincareEstimate {
  /// max over samples of ||u||_V / ||g_u||_W (0 when every sample is zero).
  double constant = 0.0;
  bool unbounded = false;
  std::size_t worst_sample = 0;
};

/// Empirical best constant C in ||u||_V <= C ||g_u||_W over the samples. A
/// sample with ||g_u|| <= tol_feasibility * ||u|| counts as g_u = 0.
inline PoincareEstimate estimate_poincare_constant(const GradientRelation& rel, const std::vector<Element>& samples,
                                                   const SolverConfig& cfg = {}) {
  require(!samples.empty(), ErrorKind::precondition, "estimate_poincare_constant: no samples");
  PoincareEstimate est;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const double nu = rel.v_space().norm.norm(samples[s].coords());
    if (nu == 0.0) continue;
    const double ng = rel.w_space().norm.norm(minimal_gradient(rel, samples[s], cfg).coords());
    if (ng <= cfg.tol_feasibility * nu) {
      est.unbounded = true;
      est.worst_sample = s;
      est.constant = std::numeric_limits<double>::infinity();
      return est;
    }
    if (nu / ng > est.constant) {
      est.constant = nu / ng;
      est.worst_sample = s;
    }
  }
  return est;
}

}  // namespace gradspace
