#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gradspace/core/gradient.hpp"
#include "gradspace/engine/cg.hpp"
#include "gradspace/engine/rayleigh.hpp"
#include "gradspace/variational/dirichlet.hpp"
#include "gradspace/variational/feasible.hpp"

namespace gradspace {

struct RayleighSolution {
  Element u;
  double value = 0.0;
  int iterations = 0;
  std::string method;
};

namespace detail {

inline Vec rayleigh_start(std::size_t n, std::uint64_t seed) {
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  return seeded_start(x, seed, 0.25);
}

/// ||g_u||_W^p and a gradient in u, for any relation with a smooth or polyhedral form.
inline engine::EnergyOracle gradient_energy(const GradientRelation& rel, const SolverConfig& cfg) {
  if (auto smooth = to_smooth(rel)) {
    auto form = std::make_shared<SmoothForm>(std::move(*smooth));
    return {[form](const Vec& u) { return form->norm.power(form->map.apply(u)); },
            [form](const Vec& u) { return form->map.apply_transpose(form->norm.power_gradient(form->map.apply(u))); }};
  }
  auto sys = to_polyhedral(rel);
  require(sys.has_value(), ErrorKind::unsupported, "rayleigh: maximal-function envelopes are not supported");
  auto shared = std::make_shared<PolyhedralSystem>(std::move(*sys));
  const NormSpec wn = rel.w_space().norm;
  return {[shared, wn, cfg](const Vec& u) {
            return wn.power(polyhedral_minimal_gradient(*shared, wn, u, cfg).gradient);
          },
          [shared, wn, cfg](const Vec& u) {
            // Envelope theorem: d/du min ||g||^p = sum_k lambda_k d rhs_k / du.
            const auto pg = polyhedral_minimal_gradient(*shared, wn, u, cfg);
            Vec grad(u.size(), 0.0);
            for (std::size_t k = 0; k < shared->constraints.size(); ++k) {
              const double lam = pg.multipliers[k];
              if (lam == 0.0) continue;
              for (const auto& term : shared->constraints[k].terms) {
                const double v = row_dot(term.form, u);
                if (v == 0.0) continue;
                const double s = lam * term.coeff * (v > 0 ? 1.0 : -1.0);
                for (const auto& [j, a] : term.form) grad[j] += s * a;
              }
            }
            return grad;
          }};
}

}  // namespace detail

/// Minimise ||g_u||_W / ||u||_V over a regular cone; returns u with ||u||_V = 1.
inline RayleighSolution minimize_rayleigh(const GradientRelation& rel, const ConeSpec& cone, const SolverConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = rel.v_space().dimension;
  require_same_size(cone.dimension(), n, "minimize_rayleigh cone");
  const NormSpec& vn = rel.v_space().norm;
  RayleighSolution out;
  Vec u;

  const auto smooth = to_smooth(rel);
  const auto wq = smooth ? detail::quadratic_row_weights(smooth->norm, smooth->map.rows()) : std::nullopt;
  const auto vq = vn.is_coordinatewise() || vn.is_schatten() ? detail::quadratic_row_weights(vn, n) : std::nullopt;
  if (wq && vq && cone.set().is_subspace()) {
    const auto fixed = cone.set().fixed_mask();
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i)
      if (!fixed[i]) free.push_back(i);
    require(!free.empty(), ErrorKind::precondition, "minimize_rayleigh: the cone is {0}");
    auto expand = [&](const Vec& v) {
      Vec x(n, 0.0);
      for (std::size_t k = 0; k < free.size(); ++k) x[free[k]] = v[k];
      return x;
    };
    const LinearOperator apply = [&](const Vec& v) {
      Vec y = smooth->map.apply(expand(v));
      for (std::size_t r = 0; r < y.size(); ++r) y[r] *= (*wq)[r];
      const Vec full = smooth->map.apply_transpose(y);
      Vec out_v(free.size());
      for (std::size_t k = 0; k < free.size(); ++k) out_v[k] = full[free[k]];
      return out_v;
    };
    Vec mass(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) mass[k] = (*vq)[free[k]];
    SolverConfig inner = cfg;
    inner.seed = 0;
    auto solve = [&](const Vec& b) {
      try {
        return engine::cg_solve(apply, b, inner, std::nullopt, 1e-2 * cfg.tol_objective).x;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::precondition) {
          throw Error(ErrorKind::regularity, "minimize_rayleigh: the gradient vanishes on a nonzero cone element");
        }
        throw;
      }
    };
    const auto ii = engine::inverse_iteration(apply, solve, mass, detail::rayleigh_start(free.size(), cfg.seed), cfg);
    u = expand(ii.vector);
    out.iterations = ii.iterations;
    out.method = "inverse-iteration";
  } else {
    engine::RayleighProblem prob;
    prob.energy = detail::gradient_energy(rel, cfg);
    prob.p_w = rel.w_space().norm.p();
    prob.norm_v = [vn](const Vec& x) { return vn.norm(x); };
    prob.norm_v_gradient = [vn](const Vec& x) {
      const double nv = vn.norm(x);
      return scaled(1.0 / (vn.p() * std::pow(nv, vn.p() - 1.0)), vn.power_gradient(x));
    };
    prob.cone = [&cone](const Vec& x) { return cone.project(x); };
    const auto r = engine::rayleigh_iterate(prob, detail::rayleigh_start(n, cfg.seed), cfg);
    u = r.point;
    out.iterations = r.iterations;
    out.method = "normalized-descent";
  }
  const double nv = vn.norm(u);
  require(nv > 0.0, ErrorKind::regularity, "minimize_rayleigh: iterate collapsed to zero");
  for (double& x : u) x /= nv;
  out.u = Element(rel.v_space(), std::move(u));
  const double g = rel.w_space().norm.norm(minimal_gradient(rel, out.u, cfg).coords());
  if (g <= cfg.tol_feasibility) {
    throw Error(ErrorKind::regularity, "minimize_rayleigh: found a unit cone element with vanishing gradient");
  }
  out.value = g / out.u.norm();
  return out;
}

/// Rayleigh quotient ||g_u||_W / ||u||_V.
inline double rayleigh_quotient(const GradientRelation& rel, const Element& u, const SolverConfig& cfg = {}) {
  const double nv = u.norm();
  require(nv > 0.0, ErrorKind::precondition, "rayleigh_quotient: u = 0");
  return rel.w_space().norm.norm(minimal_gradient(rel, u, cfg).coords()) / nv;
}

struct RkConeReport {
  /// No nonzero sample was supplied (for example the cone {0}).
  bool degenerate = true;
  bool scaling_closed = true;
  bool regular = true;
  std::optional<std::size_t> violating_sample;
  /// Empirical best constant in ||u||_V <= C ||g_u||_W over the samples.
  double poincare_constant = 0.0;
};

/// Empirical checks on a candidate Rellich-Kondrachov cone.
inline RkConeReport verify_rk_cone(const GradientRelation& rel, const ConeSpec& cone, const std::vector<Element>& samples,
                                   const SolverConfig& cfg = {}) {
  RkConeReport rep;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Vec& u = samples[s].coords();
    for (double alpha : {0.5, 2.0, 10.0})
      if (!cone.contains(scaled(alpha, u), cfg.tol_feasibility * std::max(1.0, alpha * norm_inf(u))))
        rep.scaling_closed = false;
    const double nu = samples[s].norm();
    if (nu == 0.0) continue;
    rep.degenerate = false;
    const double ng = rel.w_space().norm.norm(minimal_gradient(rel, samples[s], cfg).coords());
    if (ng <= cfg.tol_feasibility * nu) {
      rep.regular = false;
      if (!rep.violating_sample) rep.violating_sample = s;
      rep.poincare_constant = std::numeric_limits<double>::infinity();
      continue;
    }
    if (rep.regular) rep.poincare_constant = std::max(rep.poincare_constant, nu / ng);
  }
  return rep;
}

}  // namespace gradspace
