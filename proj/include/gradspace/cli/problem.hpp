#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gradspace/error.hpp"
#include "gradspace/linalg.hpp"
#include "json.hpp"

namespace gradspace::cli {

using json = nlohmann::json;

struct SolverSection {
  double tol_objective = 1e-10;
  double tol_feasibility = 1e-9;
  int max_iterations = 200000;
  std::uint64_t seed = 0;
  bool operator==(const SolverSection&) const = default;
};

struct NormSection {
  double p_V = 2.0;
  double p_W = 2.0;
  Vec weights;
  bool operator==(const NormSection&) const = default;
};

struct GridSection {
  std::string layout = "box";  // box | annulus | explicit
  std::vector<std::size_t> dims;
  double h = 0.0;
  Vec origin;
  std::size_t layers = 1;
  std::vector<bool> interior;
  Vec boundary;
  double inner = 1.0;
  double outer = 2.0;
  double half = 2.5;
  Vec coefficient;
  bool operator==(const GridSection&) const = default;
};

struct MetricSection {
  std::vector<Vec> distance;
  Vec positions;
  Vec measure;
  bool operator==(const MetricSection&) const = default;
};

struct GraphSection {
  std::size_t vertices = 0;
  std::vector<std::array<double, 3>> edges;  // from, to, length
  bool operator==(const GraphSection&) const = default;
};

struct MatrixSection {
  std::size_t n = 0;
  Vec delta;
  Vec m;
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec entries;
  bool operator==(const MatrixSection&) const = default;
};

struct RelationSection {
  std::string variant;
  double lambda = 1.0;
  bool operator==(const RelationSection&) const = default;
};

struct DataSection {
  Vec f;
  std::vector<bool> fixed;
  Vec obstacle;
  std::vector<Vec> lower;  // -inf entries: no bound
  std::vector<Vec> upper;  // +inf entries: no bound
  Vec u;
  Vec psi1;
  Vec psi2;
  bool operator==(const DataSection&) const = default;
};

/// Parsed problem document.
struct ProblemFile {
  std::string problem;
  std::string instance;
  std::string order;
  std::optional<GridSection> grid;
  std::optional<MetricSection> metric;
  std::optional<GraphSection> graph;
  std::optional<MatrixSection> matrix;
  NormSection norms;
  RelationSection relation;
  DataSection data;
  SolverSection solver;
  bool operator==(const ProblemFile&) const = default;
};

inline const std::vector<std::string>& problem_kinds() {
  static const std::vector<std::string> k{"dirichlet",   "obstacle", "multi-obstacle",    "rayleigh",   "lattice-max",
                                          "lattice-min", "hajlasz",  "poincare-gradient", "biharmonic", "fredholm"};
  return k;
}

inline const std::vector<std::string>& instance_kinds() {
  static const std::vector<std::string> k{"grid", "metric", "graph", "matrix", "toy-complex"};
  return k;
}

namespace detail {

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::schema, where + ": " + what);
}

inline void allow_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) schema_error(where, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) schema_error(where, "unknown key '" + k + "'");
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(where, "number must be finite");
  return v;
}

inline std::size_t count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) schema_error(where, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

inline std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) schema_error(where, "expected a string");
  return j.get<std::string>();
}

inline Vec vector(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of numbers");
  Vec v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

/// Array of numbers where null stands for an infinite bound of the given sign.
inline Vec bound_vector(const json& j, double sign, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of numbers or nulls");
  Vec v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    v.push_back(j[i].is_null() ? sign * std::numeric_limits<double>::infinity()
                               : number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return v;
}

inline std::vector<bool> mask(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of booleans");
  std::vector<bool> m;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_boolean()) schema_error(where + "[" + std::to_string(i) + "]", "expected a boolean");
    m.push_back(j[i].get<bool>());
  }
  return m;
}

inline std::vector<std::size_t> counts(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of integers");
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(count(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

inline std::string one_of(const json& j, const std::vector<std::string>& options, const std::string& where) {
  const std::string s = text(j, where);
  for (const auto& o : options)
    if (o == s) return s;
  std::string list;
  for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
  schema_error(where, "'" + s + "' is not one of " + list);
}

inline json bound_json(const Vec& v) {
  json a = json::array();
  for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
  return a;
}

}  // namespace detail

/// Parse a problem document, checking types and key names (not dimensions).
inline ProblemFile parse_problem(const json& doc) {
  using namespace detail;
  allow_keys(doc, {"problem", "instance", "order", "grid", "metric", "graph", "matrix", "norms", "relation", "data", "solver"},
             "problem file");
  ProblemFile pf;
  if (!doc.contains("problem")) schema_error("problem file", "missing key 'problem'");
  if (!doc.contains("instance")) schema_error("problem file", "missing key 'instance'");
  pf.problem = one_of(doc["problem"], problem_kinds(), "problem");
  pf.instance = one_of(doc["instance"], instance_kinds(), "instance");
  if (doc.contains("order")) pf.order = one_of(doc["order"], {"componentwise", "psd"}, "order");

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    allow_keys(g, {"layout", "dims", "h", "origin", "layers", "interior", "boundary", "inner", "outer", "half", "coefficient"},
               "grid");
    GridSection s;
    if (g.contains("layout")) s.layout = one_of(g["layout"], {"box", "annulus", "explicit"}, "grid.layout");
    if (g.contains("dims")) s.dims = counts(g["dims"], "grid.dims");
    if (!g.contains("h")) schema_error("grid", "missing key 'h'");
    s.h = number(g["h"], "grid.h");
    if (g.contains("origin")) s.origin = vector(g["origin"], "grid.origin");
    if (g.contains("layers")) s.layers = count(g["layers"], "grid.layers");
    if (g.contains("interior")) s.interior = mask(g["interior"], "grid.interior");
    if (g.contains("boundary")) s.boundary = vector(g["boundary"], "grid.boundary");
    if (g.contains("inner")) s.inner = number(g["inner"], "grid.inner");
    if (g.contains("outer")) s.outer = number(g["outer"], "grid.outer");
    if (g.contains("half")) s.half = number(g["half"], "grid.half");
    if (g.contains("coefficient")) s.coefficient = vector(g["coefficient"], "grid.coefficient");
    pf.grid = std::move(s);
  }
  if (doc.contains("metric")) {
    const json& m = doc["metric"];
    allow_keys(m, {"distance", "positions", "measure"}, "metric");
    MetricSection s;
    if (m.contains("distance")) {
      if (!m["distance"].is_array()) schema_error("metric.distance", "expected an array of rows");
      for (std::size_t i = 0; i < m["distance"].size(); ++i)
        s.distance.push_back(vector(m["distance"][i], "metric.distance[" + std::to_string(i) + "]"));
    }
    if (m.contains("positions")) s.positions = vector(m["positions"], "metric.positions");
    if (m.contains("measure")) s.measure = vector(m["measure"], "metric.measure");
    pf.metric = std::move(s);
  }
  if (doc.contains("graph")) {
    const json& g = doc["graph"];
    allow_keys(g, {"vertices", "edges"}, "graph");
    GraphSection s;
    if (!g.contains("vertices")) schema_error("graph", "missing key 'vertices'");
    s.vertices = count(g["vertices"], "graph.vertices");
    if (g.contains("edges")) {
      if (!g["edges"].is_array()) schema_error("graph.edges", "expected an array of [from, to, length]");
      for (std::size_t e = 0; e < g["edges"].size(); ++e) {
        const std::string where = "graph.edges[" + std::to_string(e) + "]";
        const json& ej = g["edges"][e];
        if (!ej.is_array() || ej.size() != 3) schema_error(where, "expected [from, to, length]");
        s.edges.push_back({static_cast<double>(count(ej[0], where)), static_cast<double>(count(ej[1], where)),
                           number(ej[2], where)});
      }
    }
    pf.graph = std::move(s);
  }
  if (doc.contains("matrix")) {
    const json& m = doc["matrix"];
    allow_keys(m, {"n", "delta", "m", "rows", "cols", "entries"}, "matrix");
    MatrixSection s;
    if (m.contains("n")) s.n = count(m["n"], "matrix.n");
    if (m.contains("delta")) s.delta = vector(m["delta"], "matrix.delta");
    if (m.contains("m")) s.m = vector(m["m"], "matrix.m");
    if (m.contains("rows")) s.rows = count(m["rows"], "matrix.rows");
    if (m.contains("cols")) s.cols = count(m["cols"], "matrix.cols");
    if (m.contains("entries")) s.entries = vector(m["entries"], "matrix.entries");
    pf.matrix = std::move(s);
  }
  if (doc.contains("norms")) {
    const json& n = doc["norms"];
    allow_keys(n, {"p_V", "p_W", "weights"}, "norms");
    if (n.contains("p_V")) pf.norms.p_V = number(n["p_V"], "norms.p_V");
    if (n.contains("p_W")) pf.norms.p_W = number(n["p_W"], "norms.p_W");
    if (n.contains("weights")) pf.norms.weights = vector(n["weights"], "norms.weights");
  }
  if (doc.contains("relation")) {
    const json& r = doc["relation"];
    allow_keys(r, {"variant", "lambda"}, "relation");
    if (r.contains("variant")) {
      pf.relation.variant = one_of(r["variant"],
                                   {"gradient", "maximal", "mixed", "hajlasz", "ball-poincare", "graph-edge", "commutator",
                                    "bounded-below", "toy-complex-max"},
                                   "relation.variant");
    }
    if (r.contains("lambda")) pf.relation.lambda = number(r["lambda"], "relation.lambda");
  }
  if (doc.contains("data")) {
    const json& d = doc["data"];
    allow_keys(d, {"f", "fixed", "obstacle", "lower", "upper", "u", "psi1", "psi2"}, "data");
    if (d.contains("f")) pf.data.f = vector(d["f"], "data.f");
    if (d.contains("fixed")) pf.data.fixed = mask(d["fixed"], "data.fixed");
    if (d.contains("obstacle")) pf.data.obstacle = vector(d["obstacle"], "data.obstacle");
    for (const char* key : {"lower", "upper"}) {
      if (!d.contains(key)) continue;
      const json& list = d[key];
      const std::string where = std::string("data.") + key;
      if (!list.is_array()) schema_error(where, "expected an array of bound vectors");
      auto& out = std::string(key) == "lower" ? pf.data.lower : pf.data.upper;
      const double sign = std::string(key) == "lower" ? -1.0 : 1.0;
      for (std::size_t i = 0; i < list.size(); ++i) out.push_back(bound_vector(list[i], sign, where + "[" + std::to_string(i) + "]"));
    }
    if (d.contains("u")) pf.data.u = vector(d["u"], "data.u");
    if (d.contains("psi1")) pf.data.psi1 = vector(d["psi1"], "data.psi1");
    if (d.contains("psi2")) pf.data.psi2 = vector(d["psi2"], "data.psi2");
  }
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    allow_keys(s, {"tol_objective", "tol_feasibility", "max_iterations", "seed"}, "solver");
    if (s.contains("tol_objective")) pf.solver.tol_objective = number(s["tol_objective"], "solver.tol_objective");
    if (s.contains("tol_feasibility")) pf.solver.tol_feasibility = number(s["tol_feasibility"], "solver.tol_feasibility");
    if (s.contains("max_iterations")) {
      const std::size_t it = count(s["max_iterations"], "solver.max_iterations");
      if (it < 1 || it > static_cast<std::size_t>(std::numeric_limits<int>::max()))
        schema_error("solver.max_iterations", "out of range");
      pf.solver.max_iterations = static_cast<int>(it);
    }
    if (s.contains("seed")) pf.solver.seed = count(s["seed"], "solver.seed");
    if (pf.solver.tol_objective <= 0.0 || pf.solver.tol_feasibility <= 0.0)
      schema_error("solver", "tolerances must be positive");
  }
  return pf;
}

inline ProblemFile parse_problem_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::schema, std::string("problem file is not valid JSON: ") + e.what());
  }
  return parse_problem(doc);
}

inline json to_json(const ProblemFile& pf) {
  json doc;
  doc["problem"] = pf.problem;
  doc["instance"] = pf.instance;
  if (!pf.order.empty()) doc["order"] = pf.order;
  auto put = [](json& obj, const char* key, const auto& v) {
    if (!v.empty()) obj[key] = v;
  };
  if (pf.grid) {
    const auto& g = *pf.grid;
    json j;
    j["layout"] = g.layout;
    put(j, "dims", g.dims);
    j["h"] = g.h;
    put(j, "origin", g.origin);
    j["layers"] = g.layers;
    put(j, "interior", g.interior);
    put(j, "boundary", g.boundary);
    j["inner"] = g.inner;
    j["outer"] = g.outer;
    j["half"] = g.half;
    put(j, "coefficient", g.coefficient);
    doc["grid"] = j;
  }
  if (pf.metric) {
    json j = json::object();
    put(j, "distance", pf.metric->distance);
    put(j, "positions", pf.metric->positions);
    put(j, "measure", pf.metric->measure);
    doc["metric"] = j;
  }
  if (pf.graph) {
    json j;
    j["vertices"] = pf.graph->vertices;
    json edges = json::array();
    for (const auto& e : pf.graph->edges)
      edges.push_back({static_cast<std::size_t>(e[0]), static_cast<std::size_t>(e[1]), e[2]});
    j["edges"] = edges;
    doc["graph"] = j;
  }
  if (pf.matrix) {
    const auto& m = *pf.matrix;
    json j = json::object();
    if (m.n) j["n"] = m.n;
    put(j, "delta", m.delta);
    put(j, "m", m.m);
    if (m.rows) j["rows"] = m.rows;
    if (m.cols) j["cols"] = m.cols;
    put(j, "entries", m.entries);
    doc["matrix"] = j;
  }
  doc["norms"] = {{"p_V", pf.norms.p_V}, {"p_W", pf.norms.p_W}};
  put(doc["norms"], "weights", pf.norms.weights);
  json rel = {{"lambda", pf.relation.lambda}};
  if (!pf.relation.variant.empty()) rel["variant"] = pf.relation.variant;
  doc["relation"] = rel;
  json data = json::object();
  put(data, "f", pf.data.f);
  put(data, "fixed", pf.data.fixed);
  put(data, "obstacle", pf.data.obstacle);
  for (const auto* list : {&pf.data.lower, &pf.data.upper}) {
    if (list->empty()) continue;
    json a = json::array();
    for (const auto& v : *list) a.push_back(detail::bound_json(v));
    data[list == &pf.data.lower ? "lower" : "upper"] = a;
  }
  put(data, "u", pf.data.u);
  put(data, "psi1", pf.data.psi1);
  put(data, "psi2", pf.data.psi2);
  doc["data"] = data;
  doc["solver"] = {{"tol_objective", pf.solver.tol_objective},
                   {"tol_feasibility", pf.solver.tol_feasibility},
                   {"max_iterations", pf.solver.max_iterations},
                   {"seed", pf.solver.seed}};
  return doc;
}

inline std::string serialize_problem(const ProblemFile& pf) { return to_json(pf).dump(2) + "\n"; }

}  // namespace gradspace::cli
