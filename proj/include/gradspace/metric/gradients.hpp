#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gradspace/config.hpp"
#include "gradspace/core/gradient.hpp"
#include "gradspace/core/relation.hpp"
#include "gradspace/metric/space.hpp"

namespace gradspace {

/// Minimal h >= 0 with |u(x) - u(y)| <= d(x, y) (h(x) + h(y)) for all pairs,
/// minimal in L^p(mu).
inline Vec hajlasz_minimal_gradient(const FiniteMetricMeasureSpace& X, const Vec& u, double p,
                                    const SolverConfig& cfg = {}) {
  const auto rel = GradientRelation::hajlasz(X, p);
  return minimal_gradient(rel, Element(rel.v_space(), u), cfg).coords();
}

/// g_e = |u(x) - u(y)| / length_e on every edge.
inline Vec graph_minimal_upper_gradient(const WeightedGraph& G, const Vec& u) {
  require_same_size(u.size(), G.vertex_count(), "graph_minimal_upper_gradient u");
  Vec g;
  for (const auto& e : G.edges()) g.push_back(std::abs(u[e.from] - u[e.to]) / e.length);
  return g;
}

/// Minimal k >= 0 in L^p(mu) such that the 1-Poincare inequality
/// avg_B |u - u_B| <= r avg_{lambda B} k holds on every closed ball B(x, r).
inline Vec poincare_minimal_gradient(const FiniteMetricMeasureSpace& X, const Vec& u, double p, double lambda = 1.0,
                                     const SolverConfig& cfg = {}) {
  const auto rel = GradientRelation::ball_poincare(X, p, lambda);
  return minimal_gradient(rel, Element(rel.v_space(), u), cfg).coords();
}

/// Largest ball-constraint violation and smallest slack of k for u (slack 0 on a binding ball).
struct BallSlack {
  double worst_violation = 0.0;
  double min_slack = std::numeric_limits<double>::infinity();
};

inline BallSlack poincare_ball_slack(const FiniteMetricMeasureSpace& X, const Vec& u, const Vec& k, double p,
                                     double lambda = 1.0) {
  const auto sys = to_polyhedral(GradientRelation::ball_poincare(X, p, lambda));
  BallSlack out;
  for (const auto& c : sys->constraints) {
    const double gap = c.lhs(k) - c.rhs(u);
    out.worst_violation = std::max(out.worst_violation, -gap);
    if (c.rhs(u) > 0.0) out.min_slack = std::min(out.min_slack, std::abs(gap));
  }
  return out;
}

enum class MetricRelation { hajlasz, ball_poincare };

struct FriedrichsReport {
  double constant = 0.0;
  bool unbounded = false;
  std::size_t samples_used = 0;
  std::size_t worst_sample = 0;
};

/// Empirical constant sup ||u||_p / ||g_u||_p over samples vanishing outside E.
inline FriedrichsReport friedrichs_check(const FiniteMetricMeasureSpace& X, MetricRelation kind,
                                         const std::vector<bool>& E, const std::vector<Vec>& samples, double p,
                                         const SolverConfig& cfg = {}, double lambda = 1.0) {
  require_same_size(E.size(), X.size(), "friedrichs_check set");
  double outside = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i)
    if (!E[i]) outside += X.measure(i);
  require(outside > 0.0, ErrorKind::precondition, "friedrichs_check: E must leave points of positive measure outside");

  const auto rel = kind == MetricRelation::hajlasz ? GradientRelation::hajlasz(X, p)
                                                   : GradientRelation::ball_poincare(X, p, lambda);
  const NormSpec& norm = rel.v_space().norm;
  FriedrichsReport out;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Vec& u = samples[s];
    require_same_size(u.size(), X.size(), "friedrichs_check sample");
    for (std::size_t i = 0; i < X.size(); ++i) {
      require(E[i] || u[i] == 0.0, ErrorKind::precondition,
              "friedrichs_check: sample " + std::to_string(s) + " is nonzero outside E");
    }
    const double nu = norm.norm(u);
    if (nu == 0.0) continue;
    ++out.samples_used;
    const double ng = rel.w_space().norm.norm(minimal_gradient(rel, Element(rel.v_space(), u), cfg).coords());
    if (ng <= cfg.tol_feasibility * nu) {
      out.unbounded = true;
      out.constant = std::numeric_limits<double>::infinity();
      out.worst_sample = s;
      return out;
    }
    if (nu / ng > out.constant) {
      out.constant = nu / ng;
      out.worst_sample = s;
    }
  }
  return out;
}

/// Edge-by-edge comparison of the graph upper gradient against the Hajlasz
/// gradient of the path metric: ratio_e = g_e / (h(x) + h(y)).
struct UpperGradientComparison {
  Vec hajlasz;
  Vec upper;
  Vec edge_ratio;
  double max_ratio = 0.0;
  /// 4 * average(h(x), h(y)) >= g_e on every edge.
  bool factor_four_dominates = true;
};

inline UpperGradientComparison compare_hajlasz_upper(const WeightedGraph& G, const Vec& measure, const Vec& u, double p,
                                                     const SolverConfig& cfg = {}) {
  const FiniteMetricMeasureSpace X(G.path_metric(), measure);
  UpperGradientComparison out;
  out.hajlasz = hajlasz_minimal_gradient(X, u, p, cfg);
  out.upper = graph_minimal_upper_gradient(G, u);
  for (std::size_t e = 0; e < G.edge_count(); ++e) {
    const auto& edge = G.edges()[e];
    const double hs = out.hajlasz[edge.from] + out.hajlasz[edge.to];
    const double r = out.upper[e] == 0.0 ? 0.0 : (hs > 0.0 ? out.upper[e] / hs : std::numeric_limits<double>::infinity());
    out.edge_ratio.push_back(r);
    out.max_ratio = std::max(out.max_ratio, r);
    if (out.upper[e] > 2.0 * hs * (1.0 + 1e-9) + cfg.tol_feasibility) out.factor_four_dominates = false;
  }
  return out;
}

}  // namespace gradspace
