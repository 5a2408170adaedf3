#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gradspace/cli/build.hpp"
#include "gradspace/lattice.hpp"
#include "json.hpp"

namespace gradspace::cli {

/// Everything a subcommand produced, before it is written to disk.
struct Outcome {
  std::string status = "ok";
  std::string message;
  std::string method;
  double objective = 0.0;
  int iterations = 0;
  bool converged = true;
  double feasibility_residual = 0.0;
  double stationarity = 0.0;
  /// minimizer, minimal_gradient, multipliers, result, maximum
  std::map<std::string, Vec> fields;
  std::vector<Vec> kernel;
  nlohmann::json extra = nlohmann::json::object();
};

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool passed = false;
};

struct Certificate {
  std::vector<Check> checks;

  bool passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
  void add(std::string name, double value, double bound) {
    checks.push_back({std::move(name), value, bound, std::isfinite(value) && value <= bound});
  }
  nlohmann::json to_json() const {
    nlohmann::json j;
    j["passed"] = passed();
    auto& list = j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) list.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"passed", c.passed}});
    return j;
  }
};

namespace detail {

inline const Vec& field(const Outcome& o, const std::string& name) {
  const auto it = o.fields.find(name);
  if (it == o.fields.end()) throw Error(ErrorKind::schema, "missing field '" + name + "'");
  return it->second;
}

inline const Vec& field(const Outcome& o, const std::string& name, std::size_t n) {
  const Vec& v = field(o, name);
  require(v.size() == n, ErrorKind::schema,
          "field '" + name + "' has " + std::to_string(v.size()) + " values, expected " + std::to_string(n));
  return v;
}

/// Up to `limit` free coordinates, evenly spread.
inline std::vector<std::size_t> probe_coordinates(const std::vector<bool>& fixed, std::size_t limit = 64) {
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (!fixed[i]) free.push_back(i);
  if (free.size() <= limit) return free;
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < limit; ++k) out.push_back(free[k * free.size() / limit]);
  return out;
}

/// Largest relative decrease of E over the moves P(u +- eps e_i).
inline double directional_decrease(const std::function<double(const Vec&)>& energy,
                                   const std::function<Vec(const Vec&)>& project, const Vec& u,
                                   const std::vector<std::size_t>& coords, double eps) {
  const double e0 = energy(u);
  if (e0 <= 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t i : coords) {
    for (double s : {1.0, -1.0}) {
      Vec v = u;
      v[i] += s * eps;
      v = project(v);
      if (norm_inf(v - u) < 1e-3 * eps) continue;
      worst = std::max(worst, (e0 - energy(v)) / e0);
    }
  }
  return worst;
}

inline void certify_solve(const Instance& in, const Outcome& o, double reported, Certificate& cert) {
  const GradientRelation& rel = *in.rel;
  const std::size_t n = rel.v_space().dimension;
  const Vec& u = field(o, "minimizer", n);
  const FeasibleSet kf = in.constrained_k0().shifted(in.f->coords());
  const double scale = std::max(1.0, norm_inf(u));

  cert.add("feasibility", kf.violation(u), 10.0 * in.cfg.tol_feasibility * scale);
  const auto energy = [&](const Vec& v) {
    return rel.w_space().norm.norm(minimal_gradient(rel, Element(rel.v_space(), v), in.cfg).coords());
  };
  const double obj = energy(u);
  cert.add("objective", std::abs(obj - reported), 1e-6 * std::max(1.0, obj));

  const auto smooth = to_smooth(rel);
  if (smooth) {
    const Vec grad = smooth->map.apply_transpose(smooth->norm.power_gradient(smooth->map.apply(u)));
    const double gmax = norm_inf(grad);
    double r = 0.0;
    if (gmax > 0.0) {
      const double tau = scale / gmax;
      r = norm_inf(u - kf.project(u - scaled(tau, grad))) / tau;
    }
    cert.add("stationarity", r, 1e-6 * gmax + 1e-14);
    return;
  }
  const auto project = [&](const Vec& v) { return kf.project(v); };
  const auto coords = probe_coordinates(in.k0->fixed_mask());
  cert.add("stationarity", directional_decrease(energy, project, u, coords, 1e-4 * scale), 1e-8);
}

inline void certify_rayleigh(const Instance& in, const Outcome& o, Certificate& cert) {
  const GradientRelation& rel = *in.rel;
  const std::size_t n = rel.v_space().dimension;
  const Vec& u = field(o, "minimizer", n);
  const Element ue(rel.v_space(), u);
  cert.add("normalization", std::abs(ue.norm() - 1.0), 1e-8);
  cert.add("cone", in.k0->violation(u), 10.0 * in.cfg.tol_feasibility);
  const double value = o.extra.value("value", std::numeric_limits<double>::quiet_NaN());
  const double r = rayleigh_quotient(rel, ue, in.cfg);
  cert.add("value", std::abs(r - value), 1e-9 * std::max(1.0, r));
  const auto quotient = [&](const Vec& v) {
    const Element e(rel.v_space(), v);
    const double nv = e.norm();
    return nv > 0.0 ? rel.w_space().norm.norm(minimal_gradient(rel, e, in.cfg).coords()) / nv
                    : std::numeric_limits<double>::infinity();
  };
  const auto project = [&](const Vec& v) { return in.k0->project(v); };
  const auto coords = probe_coordinates(in.k0->fixed_mask());
  cert.add("stationarity", directional_decrease(quotient, project, u, coords, 1e-4 * std::max(1.0, norm_inf(u))), 1e-8);
}

/// Order feasibility and the variational inequality <grad N(X - T), Z - X> >= 0
/// on feasible samples Z.
inline void certify_nearest(const std::string& tag, const FeasibleSet& set, const NormSpec& norm, const Vec& x,
                            const Vec& target, double reported, Certificate& cert) {
  const double scale = std::max(1.0, norm_inf(x));
  cert.add(tag + "order", set.violation(x), 1e-8 * scale);
  const double obj = norm.norm(x - target);
  cert.add(tag + "objective", std::abs(obj - reported), 1e-6 * std::max(1.0, obj));
  const Vec grad = norm.power_gradient(x - target);
  const double gn = norm2(grad);
  double worst = 0.0;
  if (gn > 0.0) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> gauss;
    std::vector<Vec> samples{set.project(target)};
    for (int k = 0; k < 24; ++k) {
      Vec z = target;
      for (double& v : z) v += scale * gauss(rng);
      samples.push_back(set.project(z));
    }
    for (const auto& z : samples) {
      const Vec d = z - x;
      worst = std::max(worst, -dot(grad, d) / (gn * (norm2(d) + 1e-6 * scale)));
    }
  }
  cert.add(tag + "variational-inequality", worst, 1e-6);
}

inline void certify_lattice(const ProblemFile& pf, const Instance& in, const Outcome& o, double reported,
                            Certificate& cert) {
  const std::size_t n = in.psi1->size();
  const Vec& x = field(o, "result", n);
  const Vec& p1 = in.psi1->coords();
  const Vec& p2 = in.psi2->coords();
  const FeasibleSet upper = FeasibleSet(n).with_order_lower(in.order, p1).with_order_lower(in.order, p2);
  if (pf.problem == "lattice-max") {
    certify_nearest("", upper, in.lattice_norm, x, Vec(n, 0.0), reported, cert);
    return;
  }
  const Vec& top = field(o, "maximum", n);
  certify_nearest("maximum-", upper, in.lattice_norm, top, Vec(n, 0.0), in.lattice_norm.norm(top), cert);
  const FeasibleSet lower =
      FeasibleSet(n).with_order_lower(in.order, Vec(n, 0.0)).with_order_upper(in.order, p1).with_order_upper(in.order, p2);
  certify_nearest("", lower, in.lattice_norm, x, top, reported, cert);
}

/// KKT conditions of min ||g||_W^p over the constraint system, using the stored multipliers.
inline void certify_gradient(const Instance& in, const Outcome& o, double reported, Certificate& cert) {
  const GradientRelation& rel = *in.rel;
  const auto sys = to_polyhedral(rel);
  const Vec& u = in.u->coords();
  const Vec& g = field(o, "minimal_gradient", sys->w_dim);
  const Vec& lam = field(o, "multipliers", sys->constraints.size());
  const NormSpec& wn = rel.w_space().norm;
  const double p = wn.p();

  double max_rhs = 0.0, infeas = 0.0, dual_sum = 0.0, slack_sum = 0.0, neg_lam = 0.0;
  Vec pull(g.size(), 0.0);
  for (std::size_t k = 0; k < sys->constraints.size(); ++k) {
    const auto& c = sys->constraints[k];
    const double rhs = c.rhs(u), lhs = c.lhs(g);
    max_rhs = std::max(max_rhs, rhs);
    infeas = std::max(infeas, rhs - lhs);
    neg_lam = std::max(neg_lam, -lam[k]);
    dual_sum += std::max(lam[k], 0.0) * rhs;
    slack_sum += std::max(lam[k], 0.0) * std::abs(lhs - rhs);
    for (const auto& [i, a] : c.g_row) pull[i] += lam[k] * a;
  }
  for (double v : g) infeas = std::max(infeas, -v);
  cert.add("feasibility", infeas, 1e-8 * (1.0 + max_rhs));
  const double obj = wn.norm(g);
  cert.add("objective", std::abs(obj - reported), 1e-6 * std::max(1.0, obj));

  const double gmax = norm_inf(g);
  double cost_scale = 0.0, res = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = g[i] > 0.0 ? p * wn.coordinate_weight(i) * std::pow(g[i], p - 1.0) : 0.0;
    cost_scale = std::max(cost_scale, d);
    const double r = d - pull[i];
    res = std::max(res, g[i] > 1e-12 * gmax ? std::abs(r) : std::max(0.0, -r));
  }
  cert.add("multiplier-sign", neg_lam, 0.0);
  cert.add("stationarity", res, 1e-6 * (1.0 + cost_scale));
  cert.add("complementarity", slack_sum, 1e-6 * (1.0 + dual_sum));
}

inline void certify_fredholm(const Instance& in, const Outcome& o, Certificate& cert) {
  const DenseMatrix& f = *in.op;
  const std::size_t cols = f.cols();
  const double fn = f.frobenius();
  const auto rank = o.extra.value("rank", std::size_t{0});
  const double constant = o.extra.value("constant", std::numeric_limits<double>::quiet_NaN());
  cert.add("dimension-count", std::abs(static_cast<double>(rank + o.kernel.size()) - static_cast<double>(cols)), 0.0);

  double kernel_res = 0.0, ortho = 0.0;
  for (std::size_t a = 0; a < o.kernel.size(); ++a) {
    require(o.kernel[a].size() == cols, ErrorKind::schema, "kernel vector has the wrong length");
    kernel_res = std::max(kernel_res, norm2(f.apply(o.kernel[a])));
    for (std::size_t b = 0; b < o.kernel.size(); ++b)
      ortho = std::max(ortho, std::abs(dot(o.kernel[a], o.kernel[b]) - (a == b ? 1.0 : 0.0)));
  }
  cert.add("kernel-residual", kernel_res, 1e-8 * fn);
  cert.add("kernel-orthonormality", ortho, 1e-8);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    Vec v(cols);
    for (double& x : v) x = gauss(rng);
    for (const auto& k : o.kernel) axpy(-dot(k, v), k, v);
    const double nv = norm2(v);
    if (nv == 0.0) continue;
    worst = std::max(worst, nv / (constant * norm2(f.apply(v))) - 1.0);
  }
  cert.add("complement-bound", worst, 1e-8);
}

}  // namespace detail

/// Re-check the stored outcome against the problem without re-solving.
inline Certificate certify_outcome(const ProblemFile& pf, const Instance& in, const Outcome& o) {
  Certificate cert;
  const std::string& k = pf.problem;
  if (k == "rayleigh") {
    detail::certify_rayleigh(in, o, cert);
  } else if (k == "lattice-max" || k == "lattice-min") {
    detail::certify_lattice(pf, in, o, o.objective, cert);
  } else if (k == "hajlasz" || k == "poincare-gradient") {
    detail::certify_gradient(in, o, o.objective, cert);
  } else if (k == "fredholm") {
    detail::certify_fredholm(in, o, cert);
  } else {
    detail::certify_solve(in, o, o.objective, cert);
  }
  return cert;
}

}  // namespace gradspace::cli
