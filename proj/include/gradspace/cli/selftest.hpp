#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "gradspace/grid.hpp"
#include "gradspace/lattice.hpp"
#include "gradspace/matrix.hpp"
#include "gradspace/metric.hpp"
#include "gradspace/variational.hpp"

namespace gradspace::cli {

struct SelftestCase {
  std::string name;
  /// Returns an empty string on success, a diagnostic otherwise.
  std::function<std::string()> run;
};

namespace detail {

inline std::string expect_close(const Vec& got, const Vec& want, double tol) {
  if (got.size() != want.size()) return "size " + std::to_string(got.size()) + " != " + std::to_string(want.size());
  double err = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got[i] - want[i]));
  if (err <= tol) return {};
  return "max deviation " + std::to_string(err) + " > " + std::to_string(tol);
}

inline std::string expect_close(double got, double want, double tol) { return expect_close(Vec{got}, Vec{want}, tol); }

}  // namespace detail

inline std::vector<SelftestCase> selftest_cases() {
  using detail::expect_close;
  std::vector<SelftestCase> cases;

  cases.push_back({"annulus-dirichlet", [] {
                     const auto dom = GridDomain::annulus(1.0 / 32.0);
                     const auto rep = solve_p_laplace(dom, 2.0);
                     double err = 0.0, at = std::numeric_limits<double>::quiet_NaN();
                     for (std::size_t x = 0; x < dom.node_count(); ++x) {
                       if (!dom.interior()[x]) continue;
                       const Vec c = dom.coordinate(x);
                       err = std::max(err, std::abs(rep.minimizer[x] - (1.0 - std::log2(std::hypot(c[0], c[1])))));
                       if (std::abs(c[0] - 1.0) < 1e-12 && std::abs(c[1] - 1.0) < 1e-12) at = rep.minimizer[x];
                     }
                     if (err > 0.05) return "max error " + std::to_string(err);
                     return expect_close(at, 0.5, 0.05);
                   }});

  cases.push_back({"toy-complex", [] {
                     const auto rel = GradientRelation::toy_complex_max();
                     const auto k0 = FeasibleSet::whole(2).with_lower({0.0, -std::numeric_limits<double>::infinity()});
                     const auto rep = solve_dirichlet(rel, k0, Element(rel.v_space(), {1.0, 0.0}));
                     if (std::abs(rep.minimizer[1]) > 1.0 + 1e-6) return std::string("imaginary part exceeds 1");
                     const std::string e = expect_close(rep.minimizer[0], 1.0, 1e-6);
                     return e.empty() ? expect_close(rep.objective, 1.0, 1e-8) : e;
                   }});

  cases.push_back({"psd-lattice-max", [] {
                     const auto m = matrix_max(SymmetricMatrix::diagonal({1.0, 0.0}), SymmetricMatrix::diagonal({0.0, 1.0}));
                     std::string e = expect_close(m.coords(), SymmetricMatrix::identity(2).coords(), 1e-6);
                     if (!e.empty()) return e;
                     const double s5 = std::sqrt(5.0);
                     const SymmetricMatrix a{{3.0, s5}, {s5, 3.0}};
                     const auto ev = (a - SymmetricMatrix::identity(2)).eigenvalues();
                     return expect_close(ev, {2.0 - s5, 2.0 + s5}, 1e-9);
                   }});

  cases.push_back({"rayleigh-interval", [] {
                     const auto dom = GridDomain::interval(202, 0.0, 1.0);
                     const auto sol = minimize_rayleigh(grid_relation(dom, 2.0), ConeSpec(dom.zero_boundary()));
                     return expect_close(sol.value, std::numbers::pi, 0.01 * std::numbers::pi);
                   }});

  cases.push_back({"hajlasz-two-point", [] {
                     const auto X = FiniteMetricMeasureSpace::on_line({0.0, 1.0}, {1.0, 1.0});
                     return expect_close(hajlasz_minimal_gradient(X, {0.0, 1.0}, 2.0), {0.5, 0.5}, 1e-9);
                   }});

  cases.push_back({"hajlasz-non-local", [] {
                     const auto X = FiniteMetricMeasureSpace::on_line({0.0, 1.0, 2.0}, {1.0, 1.0, 10.0});
                     return expect_close(hajlasz_minimal_gradient(X, {0.0, 0.0, 1.0}, 2.0), {0.375, 0.875, 0.125}, 1e-8);
                   }});

  cases.push_back({"poincare-two-point", [] {
                     const auto X = FiniteMetricMeasureSpace::on_line({0.0, 1.0}, {1.0, 1.0});
                     return expect_close(poincare_minimal_gradient(X, {0.0, 1.0}, 2.0), {0.5, 0.5}, 1e-9);
                   }});

  cases.push_back({"graph-path", [] {
                     const WeightedGraph g(3, {{0, 1, 1.0}, {1, 2, 1.0}});
                     return expect_close(graph_minimal_upper_gradient(g, {0.0, 1.0, 3.0}), {1.0, 2.0}, 1e-12);
                   }});

  cases.push_back({"commutator", [] {
                     const auto rel = commutator_relation(SymmetricMatrix::diagonal({1.0, 2.0}));
                     const auto g = minimal_gradient(rel, Element(rel.v_space(), {0.0, 1.0, 1.0, 0.0}));
                     return expect_close(g.coords(), {0.0, 1.0, -1.0, 0.0}, 1e-12);
                   }});

  cases.push_back({"bounded-below", [] {
                     const auto rel = bounded_below_relation(SymmetricMatrix::identity(2));
                     const auto g = minimal_gradient(rel, Element(rel.v_space(), {2.0, 1.0, 1.0, 4.0}));
                     return expect_close(g.coords(), {1.0, 0.5, 0.5, 2.0}, 1e-12);
                   }});

  cases.push_back({"fredholm-diagonal", [] {
                     const auto fc = fredholm_poincare_constant(DenseMatrix(2, 2, {2.0, 0.0, 0.0, 0.0}));
                     if (fc.kernel.size() != 1) return std::string("expected a one-dimensional kernel");
                     const std::string e = expect_close(fc.constant, 0.5, 1e-12);
                     return e.empty() ? expect_close({std::abs(fc.kernel[0][0]), std::abs(fc.kernel[0][1])}, {0.0, 1.0}, 1e-12) : e;
                   }});

  cases.push_back({"schatten-norm", [] {
                     return expect_close(schatten_norm(SymmetricMatrix::diagonal({3.0, 4.0}), 2.0), 5.0, 1e-12);
                   }});

  cases.push_back({"psd-projection", [] {
                     return expect_close(psd_project(SymmetricMatrix::diagonal({-1.0, 2.0})).coords(), {0.0, 0.0, 0.0, 2.0},
                                         1e-12);
                   }});

  cases.push_back({"componentwise-lattice", [] {
                     const SpaceDescriptor s(SpaceKind::metric_points, 2, NormSpec::euclidean());
                     const Element a(s, {1.0, 0.0}), b(s, {0.0, 1.0});
                     const auto order = OrderSpec::componentwise();
                     const std::string e = expect_close(lattice_max(order, s.norm, a, b).coords(), {1.0, 1.0}, 0.0);
                     return e.empty() ? expect_close(lattice_min(order, s.norm, a, b).coords(), {0.0, 0.0}, 0.0) : e;
                   }});
  return cases;
}

/// Run every case, one PASS/FAIL line each. True iff all pass.
inline bool run_selftest(std::ostream& out) {
  bool ok = true;
  for (const auto& c : selftest_cases()) {
    std::string diag;
    try {
      diag = c.run();
    } catch (const std::exception& e) {
      diag = e.what();
    }
    if (diag.empty()) {
      out << "PASS " << c.name << "\n";
    } else {
      ok = false;
      out << "FAIL " << c.name << ": " << diag << "\n";
    }
  }
  return ok;
}

}  // namespace gradspace::cli
