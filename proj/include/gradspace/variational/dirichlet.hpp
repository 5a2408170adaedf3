#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gradspace/config.hpp"
#include "gradspace/core/gradient.hpp"
#include "gradspace/core/relation.hpp"
#include "gradspace/core/space.hpp"
#include "gradspace/engine/cg.hpp"
#include "gradspace/engine/descent.hpp"
#include "gradspace/engine/interior.hpp"
#include "gradspace/engine/separable.hpp"
#include "gradspace/variational/feasible.hpp"

namespace gradspace {

namespace detail {

/// Per-row weights r with ||y||^2 = sum_r r_i y_i^2, for p = 2 norms.
inline std::optional<Vec> quadratic_row_weights(const NormSpec& norm, std::size_t rows) {
  if (norm.p() != 2.0) return std::nullopt;
  if (!norm.is_weighted_lp()) return Vec(rows, 1.0);
  const auto& w = norm.weighted();
  if (w.blocks.empty()) return w.weights;
  Vec out;
  for (std::size_t b = 0; b < w.blocks.size(); ++b) out.insert(out.end(), w.blocks[b], w.weights[b]);
  return out;
}

inline double max_row_weight(const NormSpec& norm) {
  if (!norm.is_weighted_lp()) return 1.0;
  const auto& w = norm.weighted().weights;
  return *std::max_element(w.begin(), w.end());
}

/// base + scale * N(0, 1) noise when seed != 0; base itself otherwise.
inline Vec seeded_start(const Vec& base, std::uint64_t seed, double scale) {
  if (seed == 0) return base;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vec x = base;
  for (double& v : x) v += scale * nd(rng);
  return x;
}

inline void check_iterate_cap(const Vec& u, const SolverConfig& cfg, int iterations) {
  if (norm_inf(u) > cfg.iterate_cap) {
    throw NonConvergence("iterate norm exceeded cap; the feasible set may not be a Poincare set", u, norm_inf(u),
                         iterations);
  }
}

struct RawSolve {
  Vec u;
  int iterations = 0;
  bool converged = false;
  double stationarity = 0.0;
  std::string method;
};

inline RawSolve solve_quadratic_subspace(const SmoothForm& form, const Vec& row_w, const FeasibleSet& k0, const Vec& f,
                                         const SolverConfig& cfg) {
  const std::size_t n = f.size();
  const auto fixed = k0.fixed_mask();
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i)
    if (!fixed[i]) free.push_back(i);
  RawSolve out{f, 0, true, 0.0, "cg"};
  if (free.empty()) return out;

  auto normal = [&](const Vec& u) {
    Vec y = form.map.apply(u);
    for (std::size_t r = 0; r < y.size(); ++r) y[r] *= row_w[r];
    return form.map.apply_transpose(y);
  };
  auto expand = [&](const Vec& v) {
    Vec u(n, 0.0);
    for (std::size_t k = 0; k < free.size(); ++k) u[free[k]] = v[k];
    return u;
  };
  auto restrict_free = [&](const Vec& u) {
    Vec v(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) v[k] = u[free[k]];
    return v;
  };
  const LinearOperator apply = [&](const Vec& v) { return restrict_free(normal(expand(v))); };
  const Vec b = scaled(-1.0, restrict_free(normal(f)));

  std::optional<Vec> x0;
  if (cfg.seed != 0) x0 = seeded_start(Vec(free.size(), 0.0), cfg.seed, 0.1 * (1.0 + norm_inf(f)));
  const auto cg = engine::cg_solve(apply, b, cfg, x0, cfg.tol_objective);
  out.u = f + expand(cg.x);
  out.iterations = cg.iterations;
  out.stationarity = cg.relative_residual;
  check_iterate_cap(out.u, cfg, out.iterations);
  return out;
}

inline RawSolve solve_smooth_descent(const SmoothForm& form, const FeasibleSet& kf, const Vec& f,
                                     const SolverConfig& cfg) {
  const NormSpec& wn = form.norm;
  engine::EnergyOracle energy{
      [&](const Vec& u) { return wn.power(form.map.apply(u)); },
      [&](const Vec& u) { return form.map.apply_transpose(wn.power_gradient(form.map.apply(u))); }};
  const engine::ProjectionOracle proj = [&](const Vec& v) { return kf.project(v); };
  const Vec start = seeded_start(f, cfg.seed, 0.1 * (1.0 + norm_inf(f)));

  const double p = wn.p();
  const double lam = engine::power_iteration(
      [&](const Vec& v) { return form.map.apply_transpose(form.map.apply(v)); }, f.size());
  const double s = std::max(norm_inf(form.map.apply(kf.project(start))), 1e-8);
  engine::DescentOptions opts;
  opts.initial_lipschitz = std::clamp(p * (p - 1.0) * max_row_weight(wn) * lam * std::pow(s, p - 2.0), 1e-12, 1e12);
  opts.step_tol = 1e-3 * cfg.tol_objective;
  const auto r = engine::projected_descent(energy, proj, start, cfg, opts);
  const Vec u = engine::refine_stationarity(energy, proj, r.point, 2.0 * r.lipschitz, opts.step_tol, cfg.max_iterations);
  return {u, r.iterations, r.converged, r.step_residual, "projected-descent"};
}

/// The same joint program solved directly by a dense interior point method,
/// with one t per distinct absolute-value form. Used when it is small.
inline std::optional<RawSolve> solve_polyhedral_interior(const PolyhedralSystem& sys, const NormSpec& w_norm,
                                                         const FeasibleSet& k0, const Vec& f0, const SolverConfig& cfg) {
  constexpr std::size_t max_variables = 600;
  const std::size_t n = sys.v_dim;
  const std::size_t m = sys.w_dim;
  const auto fixed = k0.fixed_mask();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> uvar(n, none);
  std::size_t nf = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!fixed[i]) uvar[i] = nf++;
  std::map<SparseRow, std::size_t> form_index;
  std::vector<const SparseRow*> forms;
  for (const auto& c : sys.constraints)
    for (const auto& term : c.terms)
      if (form_index.emplace(term.form, forms.size()).second) forms.push_back(&term.form);
  const std::size_t gofs = nf, tofs = nf + m, total = nf + m + forms.size();
  if (total > max_variables) return std::nullopt;

  // Positive homogeneity: solve with data scaled to unit size.
  const auto box = k0.box();
  require(!box.empty, ErrorKind::infeasible, "contradictory coordinate bounds in the feasible set");
  double s = norm_inf(f0);
  for (std::size_t i = 0; i < n; ++i)
    for (double b : {box.lo[i], box.hi[i]})
      if (std::isfinite(b)) s = std::max(s, std::abs(b + f0[i]));
  for (const auto& c : k0.constraints())
    if (c.kind == SetConstraint::Kind::halfspace) s = std::max(s, std::abs(c.rhs) / norm2(c.data));
  if (!(s > 0.0)) s = 1.0;
  const Vec f = scaled(1.0 / s, f0);

  engine::SeparableProgram prog;
  prog.terms.assign(total, {engine::SeparableTerm::Kind::quadratic, 0.0, 2.0, 0.0});
  for (std::size_t i = 0; i < m; ++i) {
    prog.terms[gofs + i] = {engine::SeparableTerm::Kind::power_nonneg, w_norm.coordinate_weight(i), w_norm.p(), 0.0};
  }
  for (std::size_t t = 0; t < forms.size(); ++t) {
    for (double sign : {1.0, -1.0}) {
      engine::LinearInequality side;
      side.row.push_back({tofs + t, 1.0});
      double constant = 0.0;
      for (const auto& [j, a] : *forms[t]) {
        if (uvar[j] == none) constant += a * f[j];
        else side.row.push_back({uvar[j], -sign * a});
      }
      side.rhs = sign * constant;
      prog.constraints.push_back(std::move(side));
    }
  }
  for (const auto& c : sys.constraints) {
    engine::LinearInequality main;
    for (const auto& [j, a] : c.g_row) main.row.push_back({gofs + j, a});
    for (const auto& term : c.terms) main.row.push_back({tofs + form_index.at(term.form), -term.coeff});
    prog.constraints.push_back(std::move(main));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (uvar[i] == none) continue;
    if (std::isfinite(box.lo[i])) prog.constraints.push_back({{{uvar[i], 1.0}}, (box.lo[i] + f0[i]) / s});
    if (std::isfinite(box.hi[i])) prog.constraints.push_back({{{uvar[i], -1.0}}, -(box.hi[i] + f0[i]) / s});
  }
  for (const auto& c : k0.constraints()) {
    if (c.kind != SetConstraint::Kind::halfspace) continue;
    engine::LinearInequality h;
    double rhs = c.rhs / s;
    for (std::size_t i = 0; i < n; ++i) {
      if (uvar[i] == none || c.data[i] == 0.0) continue;
      h.row.push_back({uvar[i], c.data[i]});
      rhs += c.data[i] * f[i];
    }
    h.rhs = rhs;
    if (h.row.empty()) {
      require(rhs <= 0.0, ErrorKind::infeasible, "half-space constraint cannot hold on the fixed coordinates");
      continue;
    }
    prog.constraints.push_back(std::move(h));
  }

  const Vec u0 = scaled(1.0 / s, k0.shifted(f0).project(seeded_start(f0, cfg.seed, 0.1 * (1.0 + norm_inf(f0)))));
  Vec x(total, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (uvar[i] != none) x[uvar[i]] = u0[i];
  for (std::size_t t = 0; t < forms.size(); ++t) x[tofs + t] = std::abs(row_dot(*forms[t], u0)) + 1.0;
  for (std::size_t i = 0; i < m; ++i) x[gofs + i] = 1.0;

  engine::InteriorOptions opts;
  opts.tol = std::min(1e-11, cfg.tol_objective);
  const auto sol = engine::solve_separable_interior(prog, std::move(x), opts);
  Vec u = f0;
  for (std::size_t i = 0; i < n; ++i)
    if (uvar[i] != none) u[i] = std::clamp(s * sol.x[uvar[i]], box.lo[i] + f0[i], box.hi[i] + f0[i]);
  return RawSolve{u, sol.iterations, true, sol.residual, "interior-point"};
}

/// Joint program over (u, g, t) with t >= |form . u| for every absolute-value
/// term, solved by proximal-point steps in (u, t); each step is a separable
/// strictly convex program handled by exact dual coordinate ascent.
inline RawSolve solve_polyhedral(const PolyhedralSystem& sys, const NormSpec& w_norm, const FeasibleSet& k0,
                                 const Vec& f, const SolverConfig& cfg) {
  require(!k0.has_kind(SetConstraint::Kind::psd_lower) && !k0.has_kind(SetConstraint::Kind::psd_upper),
          ErrorKind::unsupported, "PSD-order constraints are not supported with inequality-type relations");
  const std::size_t n = sys.v_dim;
  const std::size_t m = sys.w_dim;
  const auto fixed = k0.fixed_mask();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> uvar(n, none);
  std::size_t nf = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!fixed[i]) uvar[i] = nf++;
  std::size_t nt = 0;
  for (const auto& c : sys.constraints) nt += c.terms.size();
  const std::size_t gofs = nf, tofs = nf + m, total = nf + m + nt;

  engine::SeparableProgram prog;
  prog.terms.resize(total);
  for (std::size_t i = 0; i < m; ++i) {
    prog.terms[gofs + i] = {engine::SeparableTerm::Kind::power_nonneg, w_norm.coordinate_weight(i), w_norm.p(), 0.0};
  }
  // Split a form over u into its free part (on variables) and the constant from fixed coordinates.
  auto split = [&](const SparseRow& form, double sign, SparseRow& row) {
    double constant = 0.0;
    for (const auto& [j, a] : form) {
      if (uvar[j] == none) constant += a * f[j];
      else row.push_back({uvar[j], sign * a});
    }
    return constant;
  };
  std::vector<std::pair<std::size_t, SparseRow>> abs_forms;  // (t variable, form)
  std::size_t t = tofs;
  for (const auto& c : sys.constraints) {
    engine::LinearInequality main;
    for (const auto& [j, a] : c.g_row) main.row.push_back({gofs + j, a});
    for (const auto& term : c.terms) {
      main.row.push_back({t, -term.coeff});
      for (double sign : {1.0, -1.0}) {
        engine::LinearInequality side;
        side.row.push_back({t, 1.0});
        const double constant = split(term.form, sign, side.row);
        side.rhs = -sign * constant;
        prog.constraints.push_back(std::move(side));
      }
      abs_forms.push_back({t, term.form});
      ++t;
    }
    prog.constraints.push_back(std::move(main));
  }
  const auto box = k0.box();
  require(!box.empty, ErrorKind::infeasible, "contradictory coordinate bounds in the feasible set");
  for (std::size_t i = 0; i < n; ++i) {
    if (uvar[i] == none) continue;
    if (std::isfinite(box.lo[i])) prog.constraints.push_back({{{uvar[i], 1.0}}, box.lo[i] + f[i]});
    if (std::isfinite(box.hi[i])) prog.constraints.push_back({{{uvar[i], -1.0}}, -(box.hi[i] + f[i])});
  }
  for (const auto& c : k0.constraints()) {
    if (c.kind != SetConstraint::Kind::halfspace) continue;
    engine::LinearInequality h;
    double rhs = c.rhs;
    for (std::size_t i = 0; i < n; ++i) {
      if (uvar[i] == none || c.data[i] == 0.0) continue;
      h.row.push_back({uvar[i], c.data[i]});
      rhs += c.data[i] * f[i];
    }
    h.rhs = rhs;
    if (h.row.empty()) {
      require(rhs <= 0.0, ErrorKind::infeasible, "half-space constraint cannot hold on the fixed coordinates");
      continue;
    }
    prog.constraints.push_back(std::move(h));
  }

  // Starting point: feasible u, tight t.
  const FeasibleSet kf = k0.shifted(f);
  Vec u = kf.project(seeded_start(f, cfg.seed, 0.1 * (1.0 + norm_inf(f))));
  Vec x(total, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (uvar[i] != none) x[uvar[i]] = u[i];
  for (const auto& [tv, form] : abs_forms) x[tv] = std::abs(row_dot(form, u));

  auto full_u = [&](const Vec& xs) {
    Vec out = f;
    for (std::size_t i = 0; i < n; ++i)
      if (uvar[i] != none) out[i] = xs[uvar[i]];
    return out;
  };
  const double scale = std::max({1e-300, norm_inf(f), norm_inf(u)});
  const double obj0 = std::pow(w_norm.norm(polyhedral_minimal_gradient(sys, w_norm, u, cfg).gradient), w_norm.p());
  double rho = obj0 > 0.0 ? obj0 / (scale * scale) : 1.0;
  const double rho_floor = 1e-2 * rho;

  RawSolve out{u, 0, false, 0.0, "proximal-dual-ascent"};
  std::optional<Vec> warm;
  double prev_obj = std::numeric_limits<double>::infinity();
  engine::SeparableOptions inner;
  inner.max_sweeps = cfg.max_iterations;
  for (int outer = 1; outer <= cfg.max_iterations; ++outer) {
    for (std::size_t k = 0; k < total; ++k) {
      if (k >= gofs && k < tofs) continue;
      prog.terms[k] = {engine::SeparableTerm::Kind::quadratic, rho, 2.0, x[k]};
    }
    inner.violation_tol = 1e-12 * std::max(1.0, norm_inf(x));
    auto sol = engine::solve_separable(prog, inner, warm);
    warm = sol.multipliers;
    double move = 0.0;
    for (std::size_t k = 0; k < total; ++k)
      if (k < gofs || k >= tofs) move = std::max(move, std::abs(sol.x[k] - x[k]));
    x = std::move(sol.x);
    double obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) obj += prog.terms[gofs + i].cost(x[gofs + i]);
    out.iterations = outer;
    out.stationarity = rho * move;
    check_iterate_cap(x, cfg, outer);
    const double xs = std::max(1.0, norm_inf(x));
    const bool flat = std::abs(prev_obj - obj) <= cfg.tol_objective * std::max(obj, 1e-300);
    if (move <= cfg.tol_feasibility * xs && flat) {
      out.converged = true;
      break;
    }
    prev_obj = obj;
    rho = std::max(0.5 * rho, rho_floor);
  }
  out.u = full_u(x);
  if (!out.converged) {
    throw NonConvergence("dirichlet: proximal iteration cap reached", out.u, out.stationarity, out.iterations);
  }
  return out;
}

/// Projected subgradient descent with 1/sqrt(k) steps, keeping the best iterate.
/// Used for maximal-function envelopes, whose floor is convex but nonsmooth.
inline RawSolve solve_subgradient(const GradientRelation& rel, const FeasibleSet& kf, const Vec& f,
                                  const SolverConfig& cfg) {
  const auto& env = std::get<GradientRelation::Envelope>(rel.payload());
  const NormSpec& wn = rel.w_space().norm;
  auto value = [&](const Vec& u) { return wn.power(envelope_floor(env, u)); };
  auto subgradient = [&](const Vec& u) {
    const std::size_t groups = env.groups.size();
    Vec floor(groups, 0.0);
    std::vector<Vec> dfloor(groups, Vec(u.size(), 0.0));
    for (std::size_t i = 0; i < groups; ++i) {
      if (env.combine == GradientRelation::Envelope::Combine::max_abs) {
        double best = -1.0;
        for (const auto& row : env.groups[i]) {
          const double v = row_dot(row, u);
          if (std::abs(v) > best) {
            best = std::abs(v);
            std::fill(dfloor[i].begin(), dfloor[i].end(), 0.0);
            for (const auto& [j, a] : row) dfloor[i][j] += (v < 0 ? -a : a);
          }
        }
        floor[i] = best;
      } else {
        double sq = 0.0;
        for (const auto& row : env.groups[i]) sq += row_dot(row, u) * row_dot(row, u);
        floor[i] = std::sqrt(sq);
        if (floor[i] > 0.0)
          for (const auto& row : env.groups[i]) {
            const double v = row_dot(row, u) / floor[i];
            for (const auto& [j, a] : row) dfloor[i][j] += v * a;
          }
      }
    }
    Vec level = floor;
    std::vector<Vec> dlevel = dfloor;
    if (env.maximal) {
      const auto arg = env.maximal->argmax(floor);
      level = env.maximal->apply(floor);
      for (std::size_t x = 0; x < level.size(); ++x) {
        dlevel[x].assign(u.size(), 0.0);
        for (const auto& [c, a] : env.maximal->balls[x][arg[x]]) axpy(a, dfloor[c], dlevel[x]);
      }
    }
    const Vec outer = wn.power_gradient(level);
    Vec g(u.size(), 0.0);
    for (std::size_t x = 0; x < level.size(); ++x)
      if (outer[x] != 0.0) axpy(outer[x], dlevel[x], g);
    return g;
  };

  Vec u = kf.project(seeded_start(f, cfg.seed, 0.1 * (1.0 + norm_inf(f))));
  Vec best = u;
  double best_v = value(u);
  const double step0 = 0.1 * std::max(1.0, norm_inf(f));
  int since_improved = 0;
  RawSolve out{u, 0, false, 0.0, "projected-subgradient"};
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    const Vec g = subgradient(u);
    const double gn = norm2(g);
    out.iterations = k;
    if (gn == 0.0) {
      out.converged = true;
      break;
    }
    axpy(-step0 / (std::sqrt(static_cast<double>(k)) * gn), g, u);
    u = kf.project(u);
    const double v = value(u);
    if (v < best_v - cfg.tol_objective * std::max(best_v, 1e-300)) {
      best_v = v;
      best = u;
      since_improved = 0;
    } else if (++since_improved >= 2000) {
      out.converged = true;
      break;
    }
  }
  out.u = best;
  return out;
}

inline SolveReport make_report(const GradientRelation& rel, const FeasibleSet& kf, const RawSolve& raw,
                               const SolverConfig& cfg) {
  SolveReport rep;
  rep.minimizer = Element(rel.v_space(), raw.u);
  rep.minimal_gradient = minimal_gradient(rel, rep.minimizer, cfg);
  rep.objective = rel.w_space().norm.norm(rep.minimal_gradient.coords());
  rep.iterations = raw.iterations;
  rep.feasibility_residual = kf.violation(raw.u);
  rep.converged = raw.converged && rep.feasibility_residual <= cfg.tol_feasibility;
  rep.stationarity = raw.stationarity;
  rep.method = raw.method;
  return rep;
}

}  // namespace detail

/// Minimise ||g_u||_W over u in K_f = K0 + f.
inline SolveReport solve_dirichlet(const GradientRelation& rel, const FeasibleSet& k0, const Element& f,
                                   const SolverConfig& cfg = {}) {
  cfg.validate();
  require_same_size(k0.dimension(), rel.v_space().dimension, "solve_dirichlet feasible set");
  detail::check_dims(rel, f.size(), std::nullopt);
  require(!k0.shift(), ErrorKind::precondition, "solve_dirichlet: pass K0 unshifted and f separately");
  const FeasibleSet kf = k0.shifted(f.coords());
  const bool psd = k0.has_kind(SetConstraint::Kind::psd_lower) || k0.has_kind(SetConstraint::Kind::psd_upper);
  if (!psd) {
    require(!k0.box().empty, ErrorKind::infeasible, "solve_dirichlet: K_f is empty (contradictory bounds)");
  }

  detail::RawSolve raw;
  if (const auto smooth = to_smooth(rel)) {
    const auto weights = detail::quadratic_row_weights(smooth->norm, smooth->map.rows());
    if (weights && k0.is_subspace()) {
      raw = detail::solve_quadratic_subspace(*smooth, *weights, k0, f.coords(), cfg);
    } else {
      raw = detail::solve_smooth_descent(*smooth, kf, f.coords(), cfg);
    }
  } else if (const auto sys = to_polyhedral(rel)) {
    const bool psd_bounds = k0.has_kind(SetConstraint::Kind::psd_lower) || k0.has_kind(SetConstraint::Kind::psd_upper);
    auto direct = psd_bounds ? std::nullopt : detail::solve_polyhedral_interior(*sys, rel.w_space().norm, k0, f.coords(), cfg);
    raw = direct ? std::move(*direct) : detail::solve_polyhedral(*sys, rel.w_space().norm, k0, f.coords(), cfg);
  } else {
    raw = detail::solve_subgradient(rel, kf, f.coords(), cfg);
  }
  return detail::make_report(rel, kf, raw, cfg);
}

/// True iff some v in K0 has v >= psi - f (in the given order).
inline bool check_feasible_obstacle(const FeasibleSet& k0, const Element& f, const Element& psi,
                                    const OrderSpec& order = OrderSpec::componentwise(), double tol = 1e-9) {
  require_same_size(f.size(), k0.dimension(), "check_feasible_obstacle f");
  require_same_size(psi.size(), k0.dimension(), "check_feasible_obstacle psi");
  const FeasibleSet s = k0.with_order_lower(order, psi.coords() - f.coords());
  try {
    if (s.box().empty) return false;
    return s.contains(s.project(Vec(k0.dimension(), 0.0)), tol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::infeasible || e.kind() == ErrorKind::nonconvergence) return false;
    throw;
  }
}

/// Obstacle problem u >= psi, u - f in K0: the Dirichlet problem over
/// {v in K0 : v + f >= psi}.
inline SolveReport solve_obstacle(const GradientRelation& rel, const FeasibleSet& k0, const Element& f,
                                  const Element& psi, const SolverConfig& cfg = {},
                                  const OrderSpec& order = OrderSpec::componentwise()) {
  if (!check_feasible_obstacle(k0, f, psi, order, cfg.tol_feasibility)) {
    throw Error(ErrorKind::infeasible, "solve_obstacle: no v in K0 with v + f >= psi (check_feasible_obstacle failed)");
  }
  return solve_dirichlet(rel, k0.with_order_lower(order, psi.coords() - f.coords()), f, cfg);
}

inline SolveReport solve_multi_obstacle(const GradientRelation& rel, const FeasibleSet& k0, const Element& f,
                                        const std::vector<Element>& lower, const std::vector<Element>& upper,
                                        const SolverConfig& cfg = {},
                                        const OrderSpec& order = OrderSpec::componentwise()) {
  FeasibleSet s = k0;
  for (const auto& psi : lower) s = s.with_order_lower(order, psi.coords() - f.coords());
  for (const auto& phi : upper) s = s.with_order_upper(order, phi.coords() - f.coords());
  bool feasible = false;
  try {
    feasible = !s.box().empty && s.contains(s.project(Vec(k0.dimension(), 0.0)), cfg.tol_feasibility);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::infeasible && e.kind() != ErrorKind::nonconvergence) throw;
  }
  if (!feasible) throw Error(ErrorKind::infeasible, "solve_multi_obstacle: the bounds leave no feasible element");
  return solve_dirichlet(rel, s, f, cfg);
}

}  // namespace gradspace
