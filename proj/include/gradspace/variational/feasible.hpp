#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "gradspace/core/order.hpp"
#include "gradspace/core/space.hpp"
#include "gradspace/engine/dykstra.hpp"
#include "gradspace/engine/psd.hpp"
#include "gradspace/linalg.hpp"

namespace gradspace {

/// One closed convex constraint on v (before any shift).
struct SetConstraint {
  enum class Kind {
    fixed,      // v_i = 0 where mask[i]
    lower,      // v >= data
    upper,      // v <= data
    halfspace,  // data . v >= rhs
    psd_lower,  // v - data is PSD (v read as a row-major matrix)
    psd_upper,  // data - v is PSD
  };
  Kind kind = Kind::fixed;
  std::vector<bool> mask;
  Vec data;
  double rhs = 0.0;

  bool homogeneous() const {
    switch (kind) {
      case Kind::fixed: return true;
      case Kind::halfspace: return rhs == 0.0;
      default: return std::all_of(data.begin(), data.end(), [](double x) { return x == 0.0; });
    }
  }
};

/// {v : v - shift in K0}, K0 the intersection of the listed constraints.
class FeasibleSet {
 public:
  FeasibleSet() = default;
  explicit FeasibleSet(std::size_t dimension) : dim_(dimension) {
    require(dimension >= 1, ErrorKind::precondition, "feasible set dimension must be >= 1");
  }

  static FeasibleSet whole(std::size_t dimension) { return FeasibleSet(dimension); }

  /// The linear subspace {v : v_i = 0 wherever fixed[i]}.
  static FeasibleSet subspace(std::vector<bool> fixed) {
    FeasibleSet s(fixed.size());
    s.constraints_.push_back({SetConstraint::Kind::fixed, std::move(fixed), {}, 0.0});
    return s;
  }

  static FeasibleSet zero(std::size_t dimension) { return subspace(std::vector<bool>(dimension, true)); }

  FeasibleSet with(SetConstraint c) const {
    switch (c.kind) {
      case SetConstraint::Kind::fixed: require_same_size(c.mask.size(), dim_, "fixed mask"); break;
      case SetConstraint::Kind::halfspace:
        require_same_size(c.data.size(), dim_, "half-space normal");
        require(norm2(c.data) > 0.0, ErrorKind::precondition, "half-space normal must be nonzero");
        break;
      case SetConstraint::Kind::psd_lower:
      case SetConstraint::Kind::psd_upper: matrix_side(dim_); [[fallthrough]];
      default: require_same_size(c.data.size(), dim_, "bound");
    }
    const bool bound = c.kind == SetConstraint::Kind::lower || c.kind == SetConstraint::Kind::upper;
    for (double v : c.data) {
      require(bound ? !std::isnan(v) : std::isfinite(v), ErrorKind::precondition,
              bound ? "bounds must not be NaN" : "constraint data must be finite");
    }
    require(std::isfinite(c.rhs), ErrorKind::precondition, "half-space offset must be finite");
    FeasibleSet s = *this;
    s.constraints_.push_back(std::move(c));
    return s;
  }
  FeasibleSet with_fixed(std::vector<bool> mask) const {
    return with({SetConstraint::Kind::fixed, std::move(mask), {}, 0.0});
  }
  FeasibleSet with_lower(Vec bound) const { return with({SetConstraint::Kind::lower, {}, std::move(bound), 0.0}); }
  FeasibleSet with_upper(Vec bound) const { return with({SetConstraint::Kind::upper, {}, std::move(bound), 0.0}); }
  FeasibleSet with_halfspace(Vec normal, double rhs) const {
    return with({SetConstraint::Kind::halfspace, {}, std::move(normal), rhs});
  }
  FeasibleSet with_psd_lower(Vec floor) const { return with({SetConstraint::Kind::psd_lower, {}, std::move(floor), 0.0}); }
  FeasibleSet with_psd_upper(Vec ceiling) const {
    return with({SetConstraint::Kind::psd_upper, {}, std::move(ceiling), 0.0});
  }
  /// v >= bound in the given order.
  FeasibleSet with_order_lower(const OrderSpec& order, Vec bound) const {
    return order.kind == OrderSpec::Kind::psd ? with_psd_lower(std::move(bound)) : with_lower(std::move(bound));
  }
  FeasibleSet with_order_upper(const OrderSpec& order, Vec bound) const {
    return order.kind == OrderSpec::Kind::psd ? with_psd_upper(std::move(bound)) : with_upper(std::move(bound));
  }

  FeasibleSet shifted(Vec f) const {
    require_same_size(f.size(), dim_, "feasible set shift");
    FeasibleSet s = *this;
    s.shift_ = std::move(f);
    return s;
  }

  std::size_t dimension() const noexcept { return dim_; }
  const std::vector<SetConstraint>& constraints() const noexcept { return constraints_; }
  const std::optional<Vec>& shift() const noexcept { return shift_; }
  Vec shift_or_zero() const { return shift_.value_or(Vec(dim_, 0.0)); }

  bool is_cone() const {
    return !shift_ && std::all_of(constraints_.begin(), constraints_.end(), [](const auto& c) { return c.homogeneous(); });
  }
  /// Only fixed-coordinate constraints: K0 is a coordinate subspace.
  bool is_subspace() const {
    return std::all_of(constraints_.begin(), constraints_.end(),
                       [](const auto& c) { return c.kind == SetConstraint::Kind::fixed; });
  }
  bool has_kind(SetConstraint::Kind k) const {
    return std::any_of(constraints_.begin(), constraints_.end(), [k](const auto& c) { return c.kind == k; });
  }
  /// Union of all fixed masks.
  std::vector<bool> fixed_mask() const {
    std::vector<bool> m(dim_, false);
    for (const auto& c : constraints_)
      if (c.kind == SetConstraint::Kind::fixed)
        for (std::size_t i = 0; i < dim_; ++i) m[i] = m[i] || c.mask[i];
    return m;
  }

  /// Componentwise bounds implied by the fixed/lower/upper constraints of K0.
  struct Box {
    Vec lo;
    Vec hi;
    bool empty = false;
  };
  Box box() const {
    const double inf = std::numeric_limits<double>::infinity();
    Box b{Vec(dim_, -inf), Vec(dim_, inf), false};
    for (const auto& c : constraints_) {
      for (std::size_t i = 0; i < dim_; ++i) {
        switch (c.kind) {
          case SetConstraint::Kind::fixed:
            if (c.mask[i]) {
              b.lo[i] = std::max(b.lo[i], 0.0);
              b.hi[i] = std::min(b.hi[i], 0.0);
            }
            break;
          case SetConstraint::Kind::lower: b.lo[i] = std::max(b.lo[i], c.data[i]); break;
          case SetConstraint::Kind::upper: b.hi[i] = std::min(b.hi[i], c.data[i]); break;
          default: break;
        }
      }
    }
    for (std::size_t i = 0; i < dim_; ++i)
      if (b.lo[i] > b.hi[i]) b.empty = true;
    return b;
  }

  /// Projection oracles for the pieces of K0 (box first, then the rest).
  std::vector<engine::ProjectionOracle> oracles() const {
    std::vector<engine::ProjectionOracle> out;
    const Box b = box();
    require(!b.empty, ErrorKind::infeasible, "feasible set: contradictory coordinate bounds");
    out.push_back([b](const Vec& v) {
      Vec w = v;
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::clamp(w[i], b.lo[i], b.hi[i]);
      return w;
    });
    for (const auto& c : constraints_) {
      if (c.kind == SetConstraint::Kind::halfspace) {
        const double aa = dot(c.data, c.data);
        out.push_back([c, aa](const Vec& v) {
          const double s = dot(c.data, v);
          Vec w = v;
          if (s < c.rhs) axpy((c.rhs - s) / aa, c.data, w);
          return w;
        });
      } else if (c.kind == SetConstraint::Kind::psd_lower || c.kind == SetConstraint::Kind::psd_upper) {
        const std::size_t n = matrix_side(dim_);
        const DenseMatrix bound(n, n, c.data);
        const bool lower = c.kind == SetConstraint::Kind::psd_lower;
        out.push_back([n, bound, lower](const Vec& v) {
          const DenseMatrix x(n, n, v);
          return (lower ? engine::project_above(x, bound) : engine::project_below(x, bound)).data();
        });
      }
    }
    return out;
  }

  /// Nearest point (Euclidean in coordinates) of the shifted set.
  Vec project(const Vec& v, const engine::DykstraOptions& opts = {}) const {
    require_same_size(v.size(), dim_, "feasible set projection");
    const Vec f = shift_or_zero();
    const auto pieces = oracles();
    const Vec w = v - f;
    const Vec p = pieces.size() == 1 ? pieces.front()(w) : engine::dykstra(pieces, w, opts).point;
    return p + f;
  }

  /// Largest violation of any constraint at v, each measured in its own units
  /// (coordinates, signed distance to a half-space, negative eigenvalue).
  double violation(const Vec& v) const {
    require_same_size(v.size(), dim_, "feasible set membership");
    const Vec w = v - shift_or_zero();
    double worst = 0.0;
    for (const auto& c : constraints_) {
      switch (c.kind) {
        case SetConstraint::Kind::fixed:
          for (std::size_t i = 0; i < dim_; ++i)
            if (c.mask[i]) worst = std::max(worst, std::abs(w[i]));
          break;
        case SetConstraint::Kind::lower:
          for (std::size_t i = 0; i < dim_; ++i) worst = std::max(worst, c.data[i] - w[i]);
          break;
        case SetConstraint::Kind::upper:
          for (std::size_t i = 0; i < dim_; ++i) worst = std::max(worst, w[i] - c.data[i]);
          break;
        case SetConstraint::Kind::halfspace: worst = std::max(worst, (c.rhs - dot(c.data, w)) / norm2(c.data)); break;
        case SetConstraint::Kind::psd_lower:
        case SetConstraint::Kind::psd_upper: {
          const std::size_t n = matrix_side(dim_);
          const DenseMatrix x(n, n, w);
          const DenseMatrix b(n, n, c.data);
          const DenseMatrix d = c.kind == SetConstraint::Kind::psd_lower ? x - b : b - x;
          worst = std::max(worst, (x - x.transpose()).frobenius());
          worst = std::max(worst, -engine::smallest_eigenvalue(engine::symmetric_part(d)));
          break;
        }
      }
    }
    return worst;
  }

  bool contains(const Vec& v, double tol) const { return violation(v) <= tol; }

 private:
  std::size_t dim_ = 1;
  std::vector<SetConstraint> constraints_;
  std::optional<Vec> shift_;
};

/// A closed cone given by positively homogeneous constraints.
class ConeSpec {
 public:
  explicit ConeSpec(FeasibleSet constraints) : set_(std::move(constraints)) {
    require(set_.is_cone(), ErrorKind::precondition, "cone constraints must be unshifted and positively homogeneous");
  }
  static ConeSpec whole(std::size_t dimension) { return ConeSpec(FeasibleSet::whole(dimension)); }

  const FeasibleSet& set() const noexcept { return set_; }
  std::size_t dimension() const noexcept { return set_.dimension(); }
  bool contains(const Vec& v, double tol) const { return set_.contains(v, tol); }
  Vec project(const Vec& v) const { return set_.project(v); }

 private:
  FeasibleSet set_;
};

}  // namespace gradspace
