#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gradspace/core/space.hpp"
#include "gradspace/linalg.hpp"
#include "gradspace/metric/space.hpp"

namespace gradspace {

/// v -> max over a family of weighted averages per output point (a discrete
/// maximal function). balls[x] lists the averaging rows considered at x.
struct BallAverageMax {
  std::size_t input_dim = 0;
  std::vector<std::vector<SparseRow>> balls;

  std::size_t output_dim() const { return balls.size(); }

  Vec apply(const Vec& v) const {
    require_same_size(v.size(), input_dim, "maximal function input");
    Vec out(balls.size(), 0.0);
    for (std::size_t x = 0; x < balls.size(); ++x) {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& b : balls[x]) best = std::max(best, row_dot(b, v));
      out[x] = best;
    }
    return out;
  }

  /// Index of the maximising ball at each output point.
  std::vector<std::size_t> argmax(const Vec& v) const {
    std::vector<std::size_t> idx(balls.size(), 0);
    for (std::size_t x = 0; x < balls.size(); ++x) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < balls[x].size(); ++k) {
        const double a = row_dot(balls[x][k], v);
        if (a > best) {
          best = a;
          idx[x] = k;
        }
      }
    }
    return idx;
  }
};

/// One inequality g_row . g >= sum_m coeff_m |form_m . u| of a polyhedral relation.
struct AbsTerm {
  double coeff = 1.0;
  SparseRow form;
};

struct GradientConstraint {
  SparseRow g_row;
  std::vector<AbsTerm> terms;

  double lhs(std::span<const double> g) const { return row_dot(g_row, g); }
  double rhs(std::span<const double> u) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.coeff * std::abs(row_dot(t.form, u));
    return s;
  }
};

/// Relation {(u, g) : g >= 0 and every constraint holds}. All inequality-type
/// relations compile to this form.
struct PolyhedralSystem {
  std::size_t v_dim = 0;
  std::size_t w_dim = 0;
  std::vector<GradientConstraint> constraints;
};

class GradientRelation {
 public:
  struct LinearGraph {
    SparseMatrix map;
  };
  /// g >= floor(u) componentwise, floor_i(u) = combine over group i of |form . u|,
  /// optionally followed by a discrete maximal function.
  struct Envelope {
    enum class Combine { max_abs, euclidean };
    Combine combine = Combine::max_abs;
    std::vector<std::vector<SparseRow>> groups;
    std::optional<BallAverageMax> maximal;
  };
  struct Hajlasz {
    FiniteMetricMeasureSpace space;
  };
  struct BallPoincare {
    FiniteMetricMeasureSpace space;
    double lambda = 1.0;
  };
  struct GraphEdge {
    WeightedGraph graph;
  };
  using Payload = std::variant<LinearGraph, Envelope, Hajlasz, BallPoincare, GraphEdge>;

  GradientRelation(SpaceDescriptor v, SpaceDescriptor w, Payload payload)
      : v_(std::move(v)), w_(std::move(w)), payload_(std::move(payload)) {
    validate();
  }

  static GradientRelation linear_graph(SparseMatrix map, SpaceDescriptor v, SpaceDescriptor w) {
    return GradientRelation(std::move(v), std::move(w), LinearGraph{std::move(map)});
  }

  static GradientRelation envelope(Envelope env, SpaceDescriptor v, SpaceDescriptor w) {
    return GradientRelation(std::move(v), std::move(w), std::move(env));
  }

  /// V = L^p(mu), W = L^p(mu) on the points, (u, h) related iff
  /// |u(x) - u(y)| <= d(x, y) (h(x) + h(y)) for all pairs.
  static GradientRelation hajlasz(FiniteMetricMeasureSpace space, double p) {
    const std::size_t n = space.size();
    SpaceDescriptor sp(SpaceKind::metric_points, n, NormSpec::weighted_lp(p, space.measures()));
    return GradientRelation(sp, sp, Hajlasz{std::move(space)});
  }

  static GradientRelation ball_poincare(FiniteMetricMeasureSpace space, double p, double lambda = 1.0) {
    const std::size_t n = space.size();
    SpaceDescriptor sp(SpaceKind::metric_points, n, NormSpec::weighted_lp(p, space.measures()));
    return GradientRelation(sp, sp, BallPoincare{std::move(space), lambda});
  }

  /// V = l^p on vertices (unit weights), W = l^p on edges weighted by length.
  static GradientRelation graph_edge(WeightedGraph graph, double p) {
    SpaceDescriptor v(SpaceKind::metric_points, graph.vertex_count(), NormSpec::uniform_lp(p, graph.vertex_count()));
    const std::size_t m = std::max<std::size_t>(graph.edge_count(), 1);
    Vec lengths = graph.edge_count() ? graph.edge_lengths() : Vec{1.0};
    SpaceDescriptor w(SpaceKind::graph_edges, m, NormSpec::weighted_lp(p, lengths));
    return GradientRelation(std::move(v), std::move(w), GraphEdge{std::move(graph)});
  }

  /// V = C as (Re, Im) with the modulus, W = R, g >= max(|Re u|, |Im u|).
  static GradientRelation toy_complex_max() {
    SpaceDescriptor v(SpaceKind::toy_complex, 2, NormSpec::euclidean());
    SpaceDescriptor w(SpaceKind::toy_complex, 1, NormSpec::euclidean());
    Envelope env{Envelope::Combine::max_abs, {{SparseRow{{0, 1.0}}, SparseRow{{1, 1.0}}}}, std::nullopt};
    return GradientRelation(std::move(v), std::move(w), std::move(env));
  }

  const SpaceDescriptor& v_space() const noexcept { return v_; }
  const SpaceDescriptor& w_space() const noexcept { return w_; }
  const Payload& payload() const noexcept { return payload_; }

  bool is_linear() const { return std::holds_alternative<LinearGraph>(payload_); }

  std::string variant_name() const {
    switch (payload_.index()) {
      case 0: return "linear-graph";
      case 1: return "envelope";
      case 2: return "hajlasz";
      case 3: return "ball-poincare";
      default: return "graph-edge";
    }
  }

 private:
  void validate() const {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, LinearGraph>) {
            require(p.map.cols() == v_.dimension && p.map.rows() == w_.dimension, ErrorKind::dimension,
                    "linear-graph map must be dim(W) x dim(V)");
          } else if constexpr (std::is_same_v<T, Envelope>) {
            const std::size_t out = p.maximal ? p.maximal->output_dim() : p.groups.size();
            require(out == w_.dimension, ErrorKind::dimension, "envelope output count must equal dim(W)");
            if (p.maximal) {
              require(p.maximal->input_dim == p.groups.size(), ErrorKind::dimension,
                      "maximal function input must match the envelope groups");
            }
            for (const auto& g : p.groups) {
              require(!g.empty(), ErrorKind::precondition, "envelope groups must be nonempty");
              for (const auto& row : g)
                for (const auto& [j, a] : row) require(j < v_.dimension, ErrorKind::dimension, "envelope form index");
            }
            require(w_.norm.is_coordinatewise(), ErrorKind::precondition, "envelope relations need a coordinatewise W norm");
          } else if constexpr (std::is_same_v<T, Hajlasz>) {
            require(p.space.size() == v_.dimension && p.space.size() == w_.dimension, ErrorKind::dimension,
                    "hajlasz relation dimension");
            require(w_.norm.is_coordinatewise(), ErrorKind::precondition, "hajlasz relation needs a coordinatewise W norm");
          } else if constexpr (std::is_same_v<T, BallPoincare>) {
            require(p.space.size() == v_.dimension && p.space.size() == w_.dimension, ErrorKind::dimension,
                    "ball-poincare relation dimension");
            require(p.lambda >= 1.0, ErrorKind::precondition, "ball dilation lambda must be >= 1");
            require(w_.norm.is_coordinatewise(), ErrorKind::precondition,
                    "ball-poincare relation needs a coordinatewise W norm");
          } else {
            require(p.graph.vertex_count() == v_.dimension, ErrorKind::dimension, "graph-edge relation dimension");
            require(std::max<std::size_t>(p.graph.edge_count(), 1) == w_.dimension, ErrorKind::dimension,
                    "graph-edge W dimension must equal the edge count");
          }
        },
        payload_);
  }

  SpaceDescriptor v_;
  SpaceDescriptor w_;
  Payload payload_;
};

/// Constraint list of an inequality-type relation, or nullopt for relations
/// that are not polyhedral (linear graphs, euclidean or maximal envelopes).
inline std::optional<PolyhedralSystem> to_polyhedral(const GradientRelation& rel) {
  PolyhedralSystem sys;
  sys.v_dim = rel.v_space().dimension;
  sys.w_dim = rel.w_space().dimension;
  const auto& payload = rel.payload();

  if (const auto* h = std::get_if<GradientRelation::Hajlasz>(&payload)) {
    const auto& X = h->space;
    for (std::size_t x = 0; x < X.size(); ++x)
      for (std::size_t y = x + 1; y < X.size(); ++y) {
        const double d = X.distance(x, y);
        sys.constraints.push_back({{{x, 1.0}, {y, 1.0}}, {AbsTerm{1.0 / d, {{x, 1.0}, {y, -1.0}}}}});
      }
    return sys;
  }
  if (const auto* b = std::get_if<GradientRelation::BallPoincare>(&payload)) {
    const auto& X = b->space;
    for (double r : X.radii()) {
      for (std::size_t x = 0; x < X.size(); ++x) {
        const auto ball = X.ball(x, r);
        if (ball.size() < 2) continue;
        const auto big = X.ball(x, b->lambda * r);
        const double mb = X.measure_of(ball);
        const double mbig = X.measure_of(big);
        GradientConstraint c;
        for (std::size_t z : big) c.g_row.push_back({z, r * X.measure(z) / mbig});
        for (std::size_t y : ball) {
          SparseRow form;
          for (std::size_t z : ball) form.push_back({z, (z == y ? 1.0 : 0.0) - X.measure(z) / mb});
          c.terms.push_back({X.measure(y) / mb, std::move(form)});
        }
        sys.constraints.push_back(std::move(c));
      }
    }
    return sys;
  }
  if (const auto* g = std::get_if<GradientRelation::GraphEdge>(&payload)) {
    const auto& edges = g->graph.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      sys.constraints.push_back(
          {{{e, 1.0}}, {AbsTerm{1.0 / edges[e].length, {{edges[e].from, 1.0}, {edges[e].to, -1.0}}}}});
    }
    return sys;
  }
  if (const auto* env = std::get_if<GradientRelation::Envelope>(&payload)) {
    const bool singletons =
        std::all_of(env->groups.begin(), env->groups.end(), [](const auto& g) { return g.size() == 1; });
    if (env->maximal) {
      // g_x >= average over each ball of |form . u|, when every floor is a single form.
      if (!singletons) return std::nullopt;
      for (std::size_t x = 0; x < env->maximal->balls.size(); ++x)
        for (const auto& ball : env->maximal->balls[x]) {
          GradientConstraint c{{{x, 1.0}}, {}};
          for (const auto& [cell, a] : ball) c.terms.push_back({a, env->groups[cell].front()});
          sys.constraints.push_back(std::move(c));
        }
      return sys;
    }
    if (env->combine != GradientRelation::Envelope::Combine::max_abs) return std::nullopt;
    for (std::size_t i = 0; i < env->groups.size(); ++i)
      for (const auto& form : env->groups[i]) sys.constraints.push_back({{{i, 1.0}}, {AbsTerm{1.0, form}}});
    return sys;
  }
  return std::nullopt;
}

/// A linear map F and norm with ||g_u||_W = ||F u||, when the relation admits one.
struct SmoothForm {
  SparseMatrix map;
  NormSpec norm;
};

inline std::optional<SmoothForm> to_smooth(const GradientRelation& rel) {
  const auto& payload = rel.payload();
  if (const auto* lin = std::get_if<GradientRelation::LinearGraph>(&payload)) {
    return SmoothForm{lin->map, rel.w_space().norm};
  }
  if (const auto* g = std::get_if<GradientRelation::GraphEdge>(&payload)) {
    const auto& edges = g->graph.edges();
    std::vector<SparseRow> rows;
    for (const auto& e : edges) rows.push_back({{e.from, 1.0 / e.length}, {e.to, -1.0 / e.length}});
    if (rows.empty()) rows.push_back({});
    return SmoothForm{SparseMatrix(rows.size(), rel.v_space().dimension, rows), rel.w_space().norm};
  }
  if (const auto* env = std::get_if<GradientRelation::Envelope>(&payload)) {
    if (env->maximal) return std::nullopt;
    const auto& wn = rel.w_space().norm;
    bool singletons = std::all_of(env->groups.begin(), env->groups.end(), [](const auto& g) { return g.size() == 1; });
    std::vector<SparseRow> rows;
    Vec weights;
    std::vector<std::size_t> blocks;
    if (env->combine == GradientRelation::Envelope::Combine::max_abs && !singletons) return std::nullopt;
    for (std::size_t i = 0; i < env->groups.size(); ++i) {
      for (const auto& r : env->groups[i]) rows.push_back(r);
      weights.push_back(wn.coordinate_weight(i));
      blocks.push_back(env->groups[i].size());
    }
    const double p = wn.p();
    NormSpec norm = singletons ? (wn.is_euclidean() ? NormSpec::euclidean() : NormSpec::weighted_lp(p, weights))
                               : NormSpec::weighted_lp(p, weights, blocks);
    return SmoothForm{SparseMatrix(rows.size(), rel.v_space().dimension, rows), norm};
  }
  return std::nullopt;
}

}  // namespace gradspace
