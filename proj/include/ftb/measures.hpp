#pragma once

// Finitely supported marginals and joint measures on product grids, cdf
// evaluation, and the two marginal order predicates used by the Fréchet
// classes.

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ftb/error.hpp"
#include "ftb/scalar.hpp"

namespace ftb {

template <class T>
struct Atom {
  T point;
  T mass;
};

/// A finitely supported (sub-)probability on the real line. Points are strictly
/// increasing and masses nonnegative; zero-mass atoms are allowed and simply
/// extend the support grid.
template <class T>
class DiscreteMarginal {
 public:
  DiscreteMarginal() = default;

  explicit DiscreteMarginal(std::vector<Atom<T>> atoms, bool require_probability = false,
                            const T& tol = default_tolerance<T>())
      : atoms_(std::move(atoms)), require_probability_(require_probability) {
    T total(0);
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
      if (atoms_[k].mass < T(0)) throw InputError("marginal atom with negative mass");
      if (k > 0 && !(atoms_[k - 1].point < atoms_[k].point))
        throw InputError("marginal points must be strictly increasing");
      total += atoms_[k].mass;
    }
    if (total > T(1) + tol) throw InputError("marginal total mass exceeds 1");
    if (require_probability_ && abs_value(T(total - T(1))) > tol)
      throw InputError("marginal must be a probability measure (total mass " +
                       format_scalar(total) + ")");
  }

  static DiscreteMarginal probability(std::vector<Atom<T>> atoms,
                                      const T& tol = default_tolerance<T>()) {
    return DiscreteMarginal(std::move(atoms), true, tol);
  }

  const std::vector<Atom<T>>& atoms() const { return atoms_; }
  bool requires_probability() const { return require_probability_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  std::vector<T> points() const {
    std::vector<T> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.point);
    return out;
  }

  T total_mass() const {
    T total(0);
    for (const auto& a : atoms_) total += a.mass;
    return total;
  }

  /// Mass at exactly `point`; zero off the support.
  T mass_at(const T& point) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), point,
                               [](const Atom<T>& a, const T& p) { return a.point < p; });
    if (it != atoms_.end() && it->point == point) return it->mass;
    return T(0);
  }

  /// Mass of (-inf, t].
  T cdf(const T& t) const {
    T acc(0);
    for (const auto& a : atoms_) {
      if (t < a.point) break;
      acc += a.mass;
    }
    return acc;
  }

  /// Mass of the half-open interval (lo, hi]; zero when lo >= hi.
  T interval_mass(const T& lo, const T& hi) const {
    return positive_part(T(cdf(hi) - cdf(lo)));
  }

  DiscreteMarginal scaled(const T& factor) const {
    std::vector<Atom<T>> out = atoms_;
    for (auto& a : out) a.mass *= factor;
    return DiscreteMarginal(std::move(out));
  }

 private:
  std::vector<Atom<T>> atoms_;
  bool require_probability_ = false;
};

template <class T>
using Marginals = std::vector<DiscreteMarginal<T>>;

template <class T>
T cdf_eval(const DiscreteMarginal<T>& m, const T& t) {
  return m.cdf(t);
}

/// Sorted union of the support points of two marginals.
template <class T>
std::vector<T> union_points(const DiscreteMarginal<T>& a, const DiscreteMarginal<T>& b) {
  std::vector<T> pa = a.points();
  std::vector<T> pb = b.points();
  std::vector<T> out;
  out.reserve(pa.size() + pb.size());
  std::set_union(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(out));
  return out;
}

/// Zero-order (setwise) domination of `a` by `b`: every atom of `a` carries at
/// most the mass `b` places at the same point.
template <class T>
bool dominates_order0(const DiscreteMarginal<T>& a, const DiscreteMarginal<T>& b,
                      const T& tol = default_tolerance<T>()) {
  for (const auto& atom : a.atoms()) {
    if (atom.mass > b.mass_at(atom.point) + tol) return false;
  }
  return true;
}

/// First-order predicate with the cdf-below convention: the cdf of `a` lies
/// below the cdf of `b` at every breakpoint of either support.
template <class T>
bool dominates_order1(const DiscreteMarginal<T>& a, const DiscreteMarginal<T>& b,
                      const T& tol = default_tolerance<T>()) {
  for (const auto& t : union_points(a, b)) {
    if (a.cdf(t) > b.cdf(t) + tol) return false;
  }
  return true;
}

/// Product of d strictly increasing axes. Points are enumerated in row-major
/// order with the last axis varying fastest.
template <class T>
class ProductGrid {
 public:
  ProductGrid() = default;

  explicit ProductGrid(std::vector<std::vector<T>> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw InputError("product grid needs at least one axis");
    size_ = 1;
    for (const auto& axis : axes_) {
      if (axis.empty()) throw InputError("product grid axis is empty");
      for (std::size_t k = 1; k < axis.size(); ++k) {
        if (!(axis[k - 1] < axis[k]))
          throw InputError("product grid axis must be strictly increasing");
      }
      size_ *= axis.size();
    }
  }

  static ProductGrid of_supports(const Marginals<T>& marginals) {
    std::vector<std::vector<T>> axes;
    axes.reserve(marginals.size());
    for (const auto& m : marginals) axes.push_back(m.points());
    return ProductGrid(std::move(axes));
  }

  std::size_t dimension() const { return axes_.size(); }
  std::size_t size() const { return size_; }
  const std::vector<T>& axis(std::size_t j) const { return axes_.at(j); }
  const std::vector<std::vector<T>>& axes() const { return axes_; }

  std::vector<std::size_t> unravel(std::size_t flat) const {
    std::vector<std::size_t> idx(axes_.size());
    for (std::size_t j = axes_.size(); j-- > 0;) {
      idx[j] = flat % axes_[j].size();
      flat /= axes_[j].size();
    }
    return idx;
  }

  std::size_t ravel(const std::vector<std::size_t>& idx) const {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < axes_.size(); ++j) flat = flat * axes_[j].size() + idx[j];
    return flat;
  }

  std::vector<T> point(std::size_t flat) const {
    std::vector<T> out(axes_.size());
    auto idx = unravel(flat);
    for (std::size_t j = 0; j < axes_.size(); ++j) out[j] = axes_[j][idx[j]];
    return out;
  }

  /// Number of points on axis j that are <= t.
  std::size_t count_leq(std::size_t j, const T& t) const {
    const auto& axis = axes_[j];
    return static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), t) -
                                    axis.begin());
  }

  /// Whether grid point `flat` lies in the closed lower orthant at `corner`.
  bool in_lower_orthant(std::size_t flat, const std::vector<T>& corner) const {
    for (std::size_t j = axes_.size(); j-- > 0;) {
      std::size_t k = flat % axes_[j].size();
      flat /= axes_[j].size();
      if (corner[j] < axes_[j][k]) return false;
    }
    return true;
  }

  bool operator==(const ProductGrid& other) const { return axes_ == other.axes_; }

 private:
  std::vector<std::vector<T>> axes_;
  std::size_t size_ = 0;
};

/// Nonnegative masses on a product grid with total mass at most one.
template <class T>
class JointMeasure {
 public:
  JointMeasure() = default;

  JointMeasure(ProductGrid<T> grid, std::vector<T> masses,
               const T& tol = default_tolerance<T>())
      : grid_(std::move(grid)), masses_(std::move(masses)) {
    if (masses_.size() != grid_.size())
      throw InputError("joint measure mass count does not match the grid");
    T total(0);
    for (auto& m : masses_) {
      if (m < T(0)) {
        if (m < -tol) throw InputError("joint measure with negative mass");
        m = T(0);
      }
      total += m;
    }
    if (total > T(1) + tol) throw InputError("joint measure total mass exceeds 1");
  }

  /// Zero measure on `grid`.
  static JointMeasure zero(ProductGrid<T> grid) {
    std::vector<T> masses(grid.size(), T(0));
    return JointMeasure(std::move(grid), std::move(masses));
  }

  /// Builds a measure from (point, mass) pairs; the grid is the product of the
  /// distinct coordinates per axis. Repeated points accumulate.
  static JointMeasure from_atoms(const std::vector<std::pair<std::vector<T>, T>>& atoms,
                                 const T& tol = default_tolerance<T>()) {
    if (atoms.empty()) throw InputError("from_atoms needs at least one atom");
    const std::size_t d = atoms.front().first.size();
    std::vector<std::vector<T>> axes(d);
    for (const auto& [pt, mass] : atoms) {
      if (pt.size() != d) throw DimensionError("atoms of differing dimension");
      for (std::size_t j = 0; j < d; ++j) axes[j].push_back(pt[j]);
    }
    for (auto& axis : axes) {
      std::sort(axis.begin(), axis.end());
      axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    }
    ProductGrid<T> grid(std::move(axes));
    std::vector<T> masses(grid.size(), T(0));
    for (const auto& [pt, mass] : atoms) {
      std::vector<std::size_t> idx(d);
      for (std::size_t j = 0; j < d; ++j) {
        const auto& axis = grid.axis(j);
        idx[j] = static_cast<std::size_t>(std::lower_bound(axis.begin(), axis.end(), pt[j]) -
                                          axis.begin());
      }
      masses[grid.ravel(idx)] += mass;
    }
    return JointMeasure(std::move(grid), std::move(masses), tol);
  }

  const ProductGrid<T>& grid() const { return grid_; }
  const std::vector<T>& masses() const { return masses_; }
  std::size_t dimension() const { return grid_.dimension(); }

  T mass_at(const std::vector<std::size_t>& idx) const { return masses_[grid_.ravel(idx)]; }

  T total_mass() const {
    T total(0);
    for (const auto& m : masses_) total += m;
    return total;
  }

  T cdf(const std::vector<T>& x) const {
    if (x.size() != grid_.dimension()) throw DimensionError("cdf point dimension mismatch");
    T acc(0);
    for (std::size_t flat = 0; flat < masses_.size(); ++flat) {
      if (masses_[flat] != T(0) && grid_.in_lower_orthant(flat, x)) acc += masses_[flat];
    }
    return acc;
  }

  /// Projection onto axis j (0-based) over the grid's axis points.
  DiscreteMarginal<T> marginal(std::size_t j) const {
    if (j >= grid_.dimension()) throw DimensionError("marginal axis index out of range");
    const auto& axis = grid_.axis(j);
    std::vector<T> acc(axis.size(), T(0));
    for (std::size_t flat = 0; flat < masses_.size(); ++flat) {
      acc[grid_.unravel(flat)[j]] += masses_[flat];
    }
    std::vector<Atom<T>> atoms;
    atoms.reserve(axis.size());
    for (std::size_t k = 0; k < axis.size(); ++k) atoms.push_back({axis[k], acc[k]});
    // Float round-off in the projection must not trip the total-mass check.
    return DiscreteMarginal<T>(std::move(atoms), false, T(default_tolerance<T>() * T(16)));
  }

  /// Integral of per-grid-point values against the measure.
  T integrate(const std::vector<T>& values) const {
    if (values.size() != masses_.size()) throw InputError("integrand size mismatch");
    T acc(0);
    for (std::size_t k = 0; k < masses_.size(); ++k) acc += values[k] * masses_[k];
    return acc;
  }

 private:
  ProductGrid<T> grid_;
  std::vector<T> masses_;
};

template <class T>
T joint_cdf_eval(const JointMeasure<T>& mu, const std::vector<T>& x) {
  return mu.cdf(x);
}

template <class T>
DiscreteMarginal<T> marginal_of(const JointMeasure<T>& mu, std::size_t j) {
  return mu.marginal(j);
}

/// Mass of the closed lower orthant (-inf, corner]; identical to the joint cdf.
template <class T>
T lower_orthant_mass(const JointMeasure<T>& mu, const std::vector<T>& corner) {
  return mu.cdf(corner);
}

}  // namespace ftb
