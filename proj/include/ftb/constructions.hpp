#pragma once

// Class-membership verification, attaining measures for the sharp upper
// bounds of the relaxed classes, and a bundled instance on which the improved
// upper bound is not attained within the equality-constrained class.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ftb/bounds.hpp"
#include "ftb/error.hpp"
#include "ftb/lp.hpp"
#include "ftb/measures.hpp"
#include "ftb/transport.hpp"

namespace ftb {

enum class MembershipClass { Exact, Order0, Order1 };

inline const char* to_string(MembershipClass c) {
  switch (c) {
    case MembershipClass::Exact: return "exact";
    case MembershipClass::Order0: return "order0";
    case MembershipClass::Order1: return "order1";
  }
  return "?";
}

enum class ViolationKind {
  MarginalOrder0,
  MarginalOrder1,
  MarginalEquality,
  OrthantUpper,
  OrthantLower,
  OrthantEquality,
  Mass,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::MarginalOrder0: return "marginal_order0";
    case ViolationKind::MarginalOrder1: return "marginal_order1";
    case ViolationKind::MarginalEquality: return "marginal_equality";
    case ViolationKind::OrthantUpper: return "orthant_upper";
    case ViolationKind::OrthantLower: return "orthant_lower";
    case ViolationKind::OrthantEquality: return "orthant_equality";
    case ViolationKind::Mass: return "mass";
  }
  return "?";
}

template <class T>
struct Violation {
  ViolationKind kind;
  std::size_t index = 0;   // axis for marginal kinds, constraint for orthant kinds
  std::optional<T> point;  // axis point for marginal kinds
  T magnitude{};
};

template <class T>
struct MembershipReport {
  MembershipClass class_kind = MembershipClass::Exact;
  bool passed = true;
  std::vector<Violation<T>> violations;
};

/// Checks mu against the class definitions:
///   exact : probability, marginals equal, pi_lower <= mu(A) <= pi_upper;
///   order0: sub-probability, marginals atomwise dominated, mu(A) <= pi_upper;
///   order1: probability, marginal cdfs below the targets, mu(A) <= pi_upper.
template <class T>
MembershipReport<T> verify_membership(const JointMeasure<T>& mu, MembershipClass cls,
                                      const Marginals<T>& marginals,
                                      const ConstraintSet<T>& constraints,
                                      const T& tol = default_tolerance<T>()) {
  if (mu.dimension() != marginals.size())
    throw DimensionError("measure dimension does not match the marginals");
  for (const auto& c : constraints)
    if (c.corner.size() != marginals.size())
      throw DimensionError("constraint corner dimension does not match the marginals");

  MembershipReport<T> report;
  report.class_kind = cls;
  auto add = [&](ViolationKind kind, std::size_t index, std::optional<T> point, T magnitude) {
    report.violations.push_back({kind, index, std::move(point), std::move(magnitude)});
  };

  const T total = mu.total_mass();
  if (cls == MembershipClass::Order0) {
    if (total > T(1) + tol) add(ViolationKind::Mass, 0, std::nullopt, T(total - T(1)));
  } else if (abs_value(T(total - T(1))) > tol) {
    add(ViolationKind::Mass, 0, std::nullopt, abs_value(T(total - T(1))));
  }

  for (std::size_t j = 0; j < marginals.size(); ++j) {
    const DiscreteMarginal<T> mj = mu.marginal(j);
    const auto& target = marginals[j];
    switch (cls) {
      case MembershipClass::Exact:
        for (const auto& t : union_points(mj, target)) {
          T diff = abs_value(T(mj.mass_at(t) - target.mass_at(t)));
          if (diff > tol) add(ViolationKind::MarginalEquality, j, t, diff);
        }
        break;
      case MembershipClass::Order0:
        for (const auto& atom : mj.atoms()) {
          T excess = atom.mass - target.mass_at(atom.point);
          if (excess > tol) add(ViolationKind::MarginalOrder0, j, atom.point, excess);
        }
        break;
      case MembershipClass::Order1:
        for (const auto& t : union_points(mj, target)) {
          T excess = mj.cdf(t) - target.cdf(t);
          if (excess > tol) add(ViolationKind::MarginalOrder1, j, t, excess);
        }
        break;
    }
  }

  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& c = constraints[i];
    const T m = mu.cdf(c.corner);
    if (cls == MembershipClass::Exact && c.is_equality()) {
      T diff = abs_value(T(m - c.pi_upper));
      if (diff > tol) add(ViolationKind::OrthantEquality, i, std::nullopt, diff);
      continue;
    }
    if (m > c.pi_upper + tol) add(ViolationKind::OrthantUpper, i, std::nullopt, T(m - c.pi_upper));
    if (cls == MembershipClass::Exact && m < c.pi_lower - tol)
      add(ViolationKind::OrthantLower, i, std::nullopt, T(c.pi_lower - m));
  }

  report.passed = report.violations.empty();
  return report;
}

/// 1 + the largest coordinate among support points, constraint corners and x.
template <class T>
T attaining_shift_point(const Marginals<T>& marginals, const ConstraintSet<T>& constraints,
                        const std::vector<T>& x) {
  T top = x.front();
  for (const auto& v : x) top = std::max(top, v);
  for (const auto& m : marginals)
    for (const auto& a : m.atoms()) top = std::max(top, a.point);
  for (const auto& c : constraints)
    for (const auto& v : c.corner) top = std::max(top, v);
  return top + T(1);
}

/// Step cdfs G_j(t) = level_j on [x_j, r) and 1 on [r, inf) used by the
/// first-order attaining construction. level_j is F_j(x_j) when the marginal
/// term binds, otherwise the binding constraint's pi_upper.
template <class T>
struct Order1Construction {
  T shift_point;
  std::vector<T> levels;
  std::optional<std::size_t> binding_constraint;

  T g_cdf(std::size_t j, const T& t, const std::vector<T>& x) const {
    if (!(t < shift_point)) return T(1);
    if (!(t < x[j])) return levels[j];
    return T(0);
  }
};

template <class T>
Order1Construction<T> order1_construction(const Marginals<T>& marginals,
                                          const ConstraintSet<T>& constraints,
                                          const std::vector<T>& x) {
  Order1Construction<T> out;
  out.binding_constraint = order1_binding_constraint(marginals, constraints, x);
  out.shift_point = attaining_shift_point(marginals, constraints, x);
  for (std::size_t j = 0; j < marginals.size(); ++j) {
    out.levels.push_back(out.binding_constraint
                             ? constraints[*out.binding_constraint].pi_upper
                             : marginals[j].cdf(x[j]));
  }
  return out;
}

/// A member of the first-order class whose cdf at x equals
/// sharp_upper_order1(x): the comonotone coupling of the step cdfs G_j, so
/// F(y) = min_j G_j(y_j). Its grid is {x_j, r} on every axis.
template <class T>
JointMeasure<T> attain_order1(const Marginals<T>& marginals, const ConstraintSet<T>& constraints,
                              const std::vector<T>& x) {
  detail::check_dimensions(marginals, constraints, x);
  const auto plan = order1_construction(marginals, constraints, x);
  const std::size_t d = x.size();
  const T& r = plan.shift_point;

  // Quantile coupling: the probability level u maps to (q_1(u), ..., q_d(u))
  // with q_j(u) = x_j for u <= level_j and r otherwise.
  std::vector<T> cuts(plan.levels);
  cuts.push_back(T(1));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<std::pair<std::vector<T>, T>> atoms;
  atoms.emplace_back(x, T(0));
  atoms.emplace_back(std::vector<T>(d, r), T(0));
  T prev(0);
  for (const auto& u : cuts) {
    if (!(prev < u)) continue;
    std::vector<T> pt(d);
    for (std::size_t j = 0; j < d; ++j) pt[j] = u <= plan.levels[j] ? x[j] : r;
    atoms.emplace_back(std::move(pt), T(u - prev));
    prev = u;
  }
  return JointMeasure<T>::from_atoms(atoms);
}

/// A member of the zero-order class whose cdf at x equals
/// sharp_upper_order0(x), taken from the Q0 transport LP.
template <class T>
JointMeasure<T> attain_order0(const Marginals<T>& marginals, const ConstraintSet<T>& constraints,
                              const std::vector<T>& x, const SolverOptions<T>& options = {}) {
  detail::check_dimensions(marginals, constraints, x);
  TransportProblem<T> problem{ClassKind::Q0, marginals, {}, constraints};
  auto payoff = PayoffGrid<T>::indicator(problem.grid(), x);
  auto result = price_bound(problem, payoff, PriceSide::Primal, options);
  return *result.plan;
}

/// LP over probability measures on `grid` in the first-order class:
/// marginal cdfs below the targets at every axis point and mu(A) <= pi_upper.
/// Maximizes Σ objective·mass. The grid should extend past every target
/// support so the class is nonempty.
template <class T>
LinearProgram<T> build_order1_class_lp(const Marginals<T>& marginals,
                                       const ConstraintSet<T>& constraints,
                                       const ProductGrid<T>& grid, std::vector<T> objective) {
  if (grid.dimension() != marginals.size()) throw DimensionError("grid dimension mismatch");
  if (objective.size() != grid.size()) throw InputError("objective size does not match grid");
  const std::size_t n = grid.size();
  LinearProgram<T> lp;
  lp.sense = Sense::Maximize;
  lp.objective = std::move(objective);
  lp.add_row(std::vector<T>(n, T(1)), Relation::Equal, T(1));
  for (std::size_t j = 0; j < grid.dimension(); ++j) {
    const auto& axis = grid.axis(j);
    for (std::size_t k = 0; k < axis.size(); ++k) {
      std::vector<T> row(n, T(0));
      for (std::size_t x = 0; x < n; ++x)
        if (grid.unravel(x)[j] <= k) row[x] = T(1);
      lp.add_row(std::move(row), Relation::LessEqual, marginals[j].cdf(axis[k]));
    }
  }
  for (const auto& c : constraints) {
    std::vector<T> row(n, T(0));
    for (std::size_t x = 0; x < n; ++x)
      if (grid.in_lower_orthant(x, c.corner)) row[x] = T(1);
    lp.add_row(std::move(row), Relation::LessEqual, c.pi_upper);
  }
  return lp;
}

template <class T>
struct CounterexampleInstance {
  Marginals<T> marginals;
  ConstraintSet<T> constraints;
  JointMeasure<T> table_measure;
  std::vector<T> query_point;
};

/// Two copies of 0.1·δ0 + 0.2·δ1 + 0.05·δ2 + 0.65·δ3, equality information
/// F(0,0)=0, F(0,2)=F(2,0)=F(1,1)=0.1, a 4x4 member of the class, and the
/// query point (0,1) at which the improved upper bound 0.1 is not attained
/// (the class maximum is 0.05).
template <class T>
CounterexampleInstance<T> counterexample_instance() {
  auto num = [](const char* s) { return parse_scalar<T>(s); };
  std::vector<Atom<T>> atoms{{num("0"), num("0.1")},
                             {num("1"), num("0.2")},
                             {num("2"), num("0.05")},
                             {num("3"), num("0.65")}};
  CounterexampleInstance<T> inst;
  inst.marginals = {DiscreteMarginal<T>::probability(atoms),
                    DiscreteMarginal<T>::probability(atoms)};
  auto pt = [&](const char* a, const char* b) { return std::vector<T>{num(a), num(b)}; };
  inst.constraints = {OrthantConstraint<T>::equality(pt("0", "0"), num("0")),
                      OrthantConstraint<T>::equality(pt("0", "2"), num("0.1")),
                      OrthantConstraint<T>::equality(pt("2", "0"), num("0.1")),
                      OrthantConstraint<T>::equality(pt("1", "1"), num("0.1"))};
  // Rows x1 = 0..3, columns x2 = 0..3.
  const char* table[4][4] = {{"0", "0.05", "0.05", "0"},
                             {"0.05", "0", "0", "0.15"},
                             {"0.05", "0", "0", "0"},
                             {"0", "0.15", "0", "0.5"}};
  std::vector<T> axis{num("0"), num("1"), num("2"), num("3")};
  ProductGrid<T> grid({axis, axis});
  std::vector<T> masses;
  for (auto& row : table)
    for (const char* m : row) masses.push_back(num(m));
  inst.table_measure = JointMeasure<T>(std::move(grid), std::move(masses));
  inst.query_point = pt("0", "1");
  return inst;
}

}  // namespace ftb
