#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gradspace/config.hpp"
#include "gradspace/core/order.hpp"
#include "gradspace/core/space.hpp"
#include "gradspace/engine/descent.hpp"
#include "gradspace/engine/dykstra.hpp"
#include "gradspace/engine/psd.hpp"
#include "gradspace/matrix/operations.hpp"
#include "gradspace/matrix/symmetric.hpp"

namespace gradspace {

/// a <= b: componentwise b - a >= -tol, or lambda_min(B - A) >= -tol.
inline bool order_leq(const OrderSpec& order, const Element& a, const Element& b, double tol = 1e-9) {
  require_same_size(a.size(), b.size(), "order_leq");
  const Vec d = b.coords() - a.coords();
  if (order.kind == OrderSpec::Kind::componentwise) {
    return std::all_of(d.begin(), d.end(), [tol](double x) { return x >= -tol; });
  }
  const std::size_t n = matrix_side(d.size());
  return engine::smallest_eigenvalue(engine::symmetric_part(DenseMatrix(n, n, d))) >= -tol;
}

namespace detail {

inline bool frobenius_like(const NormSpec& norm) { return norm.is_euclidean() || (norm.is_schatten() && norm.p() == 2.0); }

inline void check_lattice_norm(const OrderSpec& order, const NormSpec& norm) {
  if (order.kind == OrderSpec::Kind::componentwise) {
    require(norm.is_coordinatewise(), ErrorKind::unsupported,
            "componentwise lattice operations need a coordinatewise weighted l^p norm");
  } else {
    require(norm.is_euclidean() || norm.is_schatten(), ErrorKind::unsupported,
            "psd lattice operations need a Schatten (or Frobenius) norm");
  }
}

inline void require_nonnegative(const OrderSpec& order, const Element& psi, const char* what) {
  if (order.kind == OrderSpec::Kind::componentwise) {
    require(std::all_of(psi.coords().begin(), psi.coords().end(), [](double x) { return x >= 0.0; }),
            ErrorKind::precondition, std::string(what) + " must be >= 0");
  } else {
    require(is_psd(SymmetricMatrix::from_coords(psi.coords())), ErrorKind::precondition,
            std::string(what) + " must be positive semidefinite");
  }
}

/// argmin ||X - target||_p^p over the intersection of PSD-order sets, by
/// projected descent with Dykstra projections.
inline Vec schatten_nearest(const NormSpec& norm, const Vec& target, const std::vector<engine::ProjectionOracle>& sets,
                            const Vec& start, const SolverConfig& cfg) {
  engine::DykstraOptions dopts;
  dopts.increment_tol = 1e-13;
  const engine::ProjectionOracle proj = [&](const Vec& v) { return engine::dykstra(sets, v, dopts).point; };
  engine::EnergyOracle energy{[&](const Vec& x) { return norm.power(x - target); },
                              [&](const Vec& x) { return norm.power_gradient(x - target); }};
  engine::DescentOptions opts;
  const double p = norm.p();
  opts.initial_lipschitz = std::clamp(p * (p - 1.0) * std::pow(std::max(norm_inf(start - target), 1e-8), p - 2.0), 1e-6, 1e6);
  return engine::projected_descent(energy, proj, start, cfg, opts).point;
}

}  // namespace detail

/// The norm-minimal common upper bound of psi1 and psi2.
///
/// Componentwise: max(psi1, psi2, 0) coordinatewise (the pointwise maximum for
/// nonnegative inputs). PSD: inputs must be PSD; Frobenius norms use Dykstra
/// from 0, other Schatten norms refine that point by projected descent.
inline Element lattice_max(const OrderSpec& order, const NormSpec& norm, const Element& psi1, const Element& psi2,
                           const SolverConfig& cfg = {}) {
  require_same_size(psi1.size(), psi2.size(), "lattice_max");
  detail::check_lattice_norm(order, norm);
  const SpaceDescriptor& space = psi1.space();
  if (order.kind == OrderSpec::Kind::componentwise) {
    Vec m(psi1.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::max({psi1[i], psi2[i], 0.0});
    return Element(space, std::move(m));
  }
  detail::require_nonnegative(order, psi1, "psi1");
  detail::require_nonnegative(order, psi2, "psi2");
  const auto a = SymmetricMatrix::from_coords(psi1.coords());
  const auto b = SymmetricMatrix::from_coords(psi2.coords());
  const SymmetricMatrix frob = matrix_max(a, b, cfg);
  if (detail::frobenius_like(norm)) return Element(space, frob.coords());

  const std::size_t n = a.size();
  const DenseMatrix am = a.matrix(), bm = b.matrix();
  const std::vector<engine::ProjectionOracle> sets{
      [n, am](const Vec& x) { return engine::project_above(DenseMatrix(n, n, x), am).data(); },
      [n, bm](const Vec& x) { return engine::project_above(DenseMatrix(n, n, x), bm).data(); }};
  return Element(space, detail::schatten_nearest(norm, Vec(n * n, 0.0), sets, frob.coords(), cfg));
}

/// The v in {0 <= v <= psi1, v <= psi2} nearest to lattice_max(psi1, psi2).
inline Element lattice_min(const OrderSpec& order, const NormSpec& norm, const Element& psi1, const Element& psi2,
                           const SolverConfig& cfg = {}) {
  require_same_size(psi1.size(), psi2.size(), "lattice_min");
  detail::check_lattice_norm(order, norm);
  detail::require_nonnegative(order, psi1, "psi1");
  detail::require_nonnegative(order, psi2, "psi2");
  const SpaceDescriptor& space = psi1.space();
  if (order.kind == OrderSpec::Kind::componentwise) {
    Vec m(psi1.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::min(psi1[i], psi2[i]);
    return Element(space, std::move(m));
  }
  const auto a = SymmetricMatrix::from_coords(psi1.coords());
  const auto b = SymmetricMatrix::from_coords(psi2.coords());
  const SymmetricMatrix frob = matrix_min(a, b, cfg);
  if (detail::frobenius_like(norm)) return Element(space, frob.coords());

  const std::size_t n = a.size();
  const DenseMatrix zero(n, n), am = a.matrix(), bm = b.matrix();
  const std::vector<engine::ProjectionOracle> sets{
      [n, zero](const Vec& x) { return engine::project_above(DenseMatrix(n, n, x), zero).data(); },
      [n, am](const Vec& x) { return engine::project_below(DenseMatrix(n, n, x), am).data(); },
      [n, bm](const Vec& x) { return engine::project_below(DenseMatrix(n, n, x), bm).data(); }};
  const Vec top = lattice_max(order, norm, psi1, psi2, cfg).coords();
  return Element(space, detail::schatten_nearest(norm, top, sets, frob.coords(), cfg));
}

struct LubEntry {
  bool comparable = false;
  bool dominates = false;
  bool strictly_larger_norm = false;
};

struct LubReport {
  Element maximum;
  std::vector<LubEntry> entries;
  /// No candidate comparable to the maximum fails to dominate it.
  bool consistent = true;
};

/// Classify upper bounds of psi1, psi2 against their lattice maximum.
inline LubReport check_lub_property(const OrderSpec& order, const NormSpec& norm, const Element& psi1,
                                    const Element& psi2, const std::vector<Element>& candidates,
                                    const SolverConfig& cfg = {}) {
  LubReport out;
  out.maximum = lattice_max(order, norm, psi1, psi2, cfg);
  const double mnorm = norm.norm(out.maximum.coords());
  const double tol = 1e-8 * (1.0 + mnorm);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Element& c = candidates[k];
    require(order_leq(order, psi1, c, tol) && order_leq(order, psi2, c, tol), ErrorKind::precondition,
            "check_lub_property: candidate " + std::to_string(k) + " is not an upper bound");
    LubEntry e;
    e.dominates = order_leq(order, out.maximum, c, tol);
    e.comparable = e.dominates || order_leq(order, c, out.maximum, tol);
    e.strictly_larger_norm = norm.norm(c.coords()) > mnorm + tol;
    if (e.comparable && !e.dominates) out.consistent = false;
    out.entries.push_back(e);
  }
  return out;
}

/// 0 <= u <= v, u != v: true iff ||u|| < ||v|| - 1e-12 max(1, ||v||).
inline bool strict_norm_monotonicity_check(const OrderSpec& order, const NormSpec& norm, const Element& u,
                                           const Element& v) {
  require_same_size(u.size(), v.size(), "strict_norm_monotonicity_check");
  const Element zero = Element::zero(u.space());
  require(order_leq(order, zero, u, 0.0) && order_leq(order, u, v, 0.0), ErrorKind::precondition,
          "strict_norm_monotonicity_check needs 0 <= u <= v");
  require(u.coords() != v.coords(), ErrorKind::precondition, "strict_norm_monotonicity_check needs u != v");
  const double nv = norm.norm(v.coords());
  return norm.norm(u.coords()) < nv - 1e-12 * std::max(1.0, nv);
}

}  // namespace gradspace
