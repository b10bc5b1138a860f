#pragma once

// Primal transport LPs over the classes Q (fixed marginals, two-sided orthant
// bounds), Q0 (zero-order dominated sub-probabilities, orthant caps) and
// Q1_band (marginal cdfs inside an envelope, orthant floors), their dual
// superhedging LPs, the uniform strong arbitrage check, and the constraint
// generator for a known law of the componentwise maximum.

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ftb/bounds.hpp"
#include "ftb/error.hpp"
#include "ftb/lp.hpp"
#include "ftb/measures.hpp"
#include "ftb/scalar.hpp"

namespace ftb {

enum class ClassKind { Q, Q0, Q1Band };
enum class HedgeVariant { Theta, Theta0, Theta1 };

inline const char* to_string(ClassKind k) {
  switch (k) {
    case ClassKind::Q: return "Q";
    case ClassKind::Q0: return "Q0";
    case ClassKind::Q1Band: return "Q1";
  }
  return "?";
}

inline const char* to_string(HedgeVariant v) {
  switch (v) {
    case HedgeVariant::Theta: return "Theta";
    case HedgeVariant::Theta0: return "Theta0";
    case HedgeVariant::Theta1: return "Theta1";
  }
  return "?";
}

inline HedgeVariant dual_variant(ClassKind k) {
  switch (k) {
    case ClassKind::Q: return HedgeVariant::Theta;
    case ClassKind::Q0: return HedgeVariant::Theta0;
    case ClassKind::Q1Band: return HedgeVariant::Theta1;
  }
  return HedgeVariant::Theta;
}

/// Per-axis cdf envelope for the first-order band class: candidate marginals
/// must satisfy cdf_floor(t) <= F(t) <= cdf_ceiling(t) at every breakpoint.
/// `cdf_floor` is the stochastically largest admissible law.
template <class T>
struct MarginalBand {
  DiscreteMarginal<T> cdf_floor;
  DiscreteMarginal<T> cdf_ceiling;
};

/// One of the three transport problems. `marginals` is used by Q and Q0,
/// `bands` by Q1Band.
template <class T>
struct TransportProblem {
  ClassKind kind = ClassKind::Q;
  Marginals<T> marginals;
  std::vector<MarginalBand<T>> bands;
  ConstraintSet<T> constraints;

  std::size_t dimension() const {
    return kind == ClassKind::Q1Band ? bands.size() : marginals.size();
  }

  /// Axis j of the support grid: the marginal's support, or the union of the
  /// two envelope supports for Q1Band.
  std::vector<T> axis(std::size_t j) const {
    if (kind == ClassKind::Q1Band) return union_points(bands[j].cdf_floor, bands[j].cdf_ceiling);
    return marginals[j].points();
  }

  ProductGrid<T> grid() const {
    std::vector<std::vector<T>> axes;
    for (std::size_t j = 0; j < dimension(); ++j) axes.push_back(axis(j));
    return ProductGrid<T>(std::move(axes));
  }

  void validate(const T& tol = default_tolerance<T>()) const {
    if (dimension() == 0) throw DimensionError("transport problem needs at least one axis");
    if (kind == ClassKind::Q) {
      for (const auto& m : marginals) {
        if (abs_value(T(m.total_mass() - T(1))) > tol)
          throw InputError("class Q requires probability marginals");
      }
    }
    if (kind == ClassKind::Q1Band) {
      for (const auto& b : bands) {
        if (abs_value(T(b.cdf_floor.total_mass() - T(1))) > tol ||
            abs_value(T(b.cdf_ceiling.total_mass() - T(1))) > tol)
          throw InputError("band envelopes must be probability measures");
        if (!dominates_order1(b.cdf_floor, b.cdf_ceiling, tol))
          throw InputError("envelope order violation: cdf_floor exceeds cdf_ceiling");
      }
    }
    for (const auto& c : constraints) {
      if (c.corner.size() != dimension())
        throw DimensionError("constraint corner dimension does not match the problem");
    }
  }
};

enum class PayoffKind { GridSampled, LowerOrthantIndicator };

/// A payoff given by its values on a product grid.
template <class T>
struct PayoffGrid {
  ProductGrid<T> grid;
  std::vector<T> values;
  PayoffKind kind = PayoffKind::GridSampled;
  std::vector<T> corner;  // only for LowerOrthantIndicator

  static PayoffGrid sampled(ProductGrid<T> grid, std::vector<T> values) {
    if (values.size() != grid.size()) throw InputError("payoff value count does not match grid");
    return PayoffGrid{std::move(grid), std::move(values), PayoffKind::GridSampled, {}};
  }

  static PayoffGrid from_function(ProductGrid<T> grid,
                                  const std::function<T(const std::vector<T>&)>& f) {
    std::vector<T> values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) values[k] = f(grid.point(k));
    return sampled(std::move(grid), std::move(values));
  }

  static PayoffGrid indicator(ProductGrid<T> grid, std::vector<T> corner) {
    if (corner.size() != grid.dimension())
      throw DimensionError("indicator corner dimension does not match grid");
    std::vector<T> values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
      values[k] = grid.in_lower_orthant(k, corner) ? T(1) : T(0);
    return PayoffGrid{std::move(grid), std::move(values), PayoffKind::LowerOrthantIndicator,
                      std::move(corner)};
  }

  static PayoffGrid constant(ProductGrid<T> grid, const T& value) {
    std::vector<T> values(grid.size(), value);
    return sampled(std::move(grid), std::move(values));
  }
};

/// Superhedging portfolio on the problem grid: step functions f_j (and g_j for
/// Theta1) given by their values at the axis points, plus one orthant-indicator
/// position per constraint.
template <class T>
struct HedgePortfolio {
  HedgeVariant variant = HedgeVariant::Theta;
  std::vector<std::vector<T>> axes;
  std::vector<std::vector<T>> f;
  std::vector<std::vector<T>> g;  // Theta1 only
  std::vector<T> a;
  T price{};

  /// Portfolio payoff at a grid point.
  T value_at(const ProductGrid<T>& grid, std::size_t flat,
             const ConstraintSet<T>& constraints) const {
    auto idx = grid.unravel(flat);
    T v(0);
    for (std::size_t j = 0; j < f.size(); ++j) {
      v += f[j][idx[j]];
      if (!g.empty()) v -= g[j][idx[j]];
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != T(0) && grid.in_lower_orthant(flat, constraints[i].corner)) v += a[i];
    }
    return v;
  }

  /// Smallest value of (portfolio − payoff) over the grid.
  T min_slack(const PayoffGrid<T>& payoff, const ConstraintSet<T>& constraints) const {
    T best{};
    for (std::size_t k = 0; k < payoff.grid.size(); ++k) {
      T s = value_at(payoff.grid, k, constraints) - payoff.values[k];
      if (k == 0 || s < best) best = s;
    }
    return best;
  }

  bool dominates(const PayoffGrid<T>& payoff, const ConstraintSet<T>& constraints,
                 const T& tol = default_tolerance<T>()) const {
    return min_slack(payoff, constraints) >= -tol;
  }

  /// Sign and monotonicity restrictions of the variant.
  bool sign_feasible(const T& tol = default_tolerance<T>()) const {
    if (variant == HedgeVariant::Theta0) {
      for (const auto& fj : f)
        for (const auto& v : fj)
          if (v < -tol) return false;
      for (const auto& ai : a)
        if (ai < -tol) return false;
    }
    if (variant == HedgeVariant::Theta1) {
      for (const auto* fam : {&f, &g})
        for (const auto& fj : *fam)
          for (std::size_t k = 1; k < fj.size(); ++k)
            if (fj[k] < fj[k - 1] - tol) return false;
      for (const auto& ai : a)
        if (ai > tol) return false;
    }
    return true;
  }

  /// Number of strictly positive orthant positions.
  std::size_t positive_positions(const T& tol = default_tolerance<T>()) const {
    std::size_t n = 0;
    for (const auto& ai : a)
      if (ai > tol) ++n;
    return n;
  }
};

/// Price functional of a portfolio under the problem's market data.
template <class T>
T portfolio_price(const TransportProblem<T>& problem, const HedgePortfolio<T>& h) {
  T price(0);
  for (std::size_t j = 0; j < h.f.size(); ++j) {
    const auto& axis = h.axes[j];
    for (std::size_t k = 0; k < axis.size(); ++k) {
      if (h.variant == HedgeVariant::Theta1) {
        price += h.f[j][k] * problem.bands[j].cdf_floor.mass_at(axis[k]);
        price -= h.g[j][k] * problem.bands[j].cdf_ceiling.mass_at(axis[k]);
      } else {
        price += h.f[j][k] * problem.marginals[j].mass_at(axis[k]);
      }
    }
  }
  for (std::size_t i = 0; i < h.a.size(); ++i) {
    const auto& c = problem.constraints[i];
    if (h.variant == HedgeVariant::Theta1) {
      price += h.a[i] * c.pi_lower;
    } else if (h.a[i] > T(0)) {
      price += h.a[i] * c.pi_upper;
    } else {
      price += h.a[i] * c.pi_lower;
    }
  }
  return price;
}

namespace detail {

template <class T>
void check_payoff(const TransportProblem<T>& problem, const PayoffGrid<T>& payoff) {
  problem.validate();
  if (!(payoff.grid == problem.grid()))
    throw InputError("payoff grid does not match the product of marginal supports");
}

}  // namespace detail

/// Maximize Σ payoff·mass over grid measures in the problem's class.
/// Variables are the masses at grid points in row-major order.
template <class T>
LinearProgram<T> build_primal(const TransportProblem<T>& problem, const PayoffGrid<T>& payoff) {
  detail::check_payoff(problem, payoff);
  const ProductGrid<T>& grid = payoff.grid;
  const std::size_t n = grid.size();
  const std::size_t d = grid.dimension();
  LinearProgram<T> lp;
  lp.sense = Sense::Maximize;
  lp.objective = payoff.values;

  if (problem.kind == ClassKind::Q1Band) {
    lp.add_row(std::vector<T>(n, T(1)), Relation::Equal, T(1));
    for (std::size_t j = 0; j < d; ++j) {
      const auto& axis = grid.axis(j);
      for (std::size_t k = 0; k < axis.size(); ++k) {
        std::vector<T> row(n, T(0));
        for (std::size_t x = 0; x < n; ++x)
          if (grid.unravel(x)[j] <= k) row[x] = T(1);
        lp.add_row(row, Relation::GreaterEqual, problem.bands[j].cdf_floor.cdf(axis[k]));
        lp.add_row(std::move(row), Relation::LessEqual, problem.bands[j].cdf_ceiling.cdf(axis[k]));
      }
    }
  } else {
    const Relation rel = problem.kind == ClassKind::Q ? Relation::Equal : Relation::LessEqual;
    for (std::size_t j = 0; j < d; ++j) {
      const auto& atoms = problem.marginals[j].atoms();
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        std::vector<T> row(n, T(0));
        for (std::size_t x = 0; x < n; ++x)
          if (grid.unravel(x)[j] == k) row[x] = T(1);
        lp.add_row(std::move(row), rel, atoms[k].mass);
      }
    }
  }

  for (const auto& c : problem.constraints) {
    std::vector<T> row(n, T(0));
    for (std::size_t x = 0; x < n; ++x)
      if (grid.in_lower_orthant(x, c.corner)) row[x] = T(1);
    switch (problem.kind) {
      case ClassKind::Q:
        lp.add_row(row, Relation::LessEqual, c.pi_upper);
        lp.add_row(std::move(row), Relation::GreaterEqual, c.pi_lower);
        break;
      case ClassKind::Q0:
        lp.add_row(std::move(row), Relation::LessEqual, c.pi_upper);
        break;
      case ClassKind::Q1Band:
        lp.add_row(std::move(row), Relation::GreaterEqual, c.pi_lower);
        break;
    }
  }
  return lp;
}

/// Layout of the dual (superhedging) LP variables.
struct DualLayout {
  std::vector<std::size_t> f_offset;  // start of f_j values per axis
  std::vector<std::size_t> g_offset;  // Theta1 only
  std::size_t a_offset = 0;           // a (Theta0/Theta1) or a⁺ (Theta)
  std::size_t a_minus_offset = 0;     // Theta only
  std::size_t num_variables = 0;
};

template <class T>
DualLayout dual_layout(const TransportProblem<T>& problem, const ProductGrid<T>& grid) {
  DualLayout L;
  std::size_t next = 0;
  for (std::size_t j = 0; j < grid.dimension(); ++j) {
    L.f_offset.push_back(next);
    next += grid.axis(j).size();
  }
  if (problem.kind == ClassKind::Q1Band) {
    for (std::size_t j = 0; j < grid.dimension(); ++j) {
      L.g_offset.push_back(next);
      next += grid.axis(j).size();
    }
  }
  L.a_offset = next;
  next += problem.constraints.size();
  if (problem.kind == ClassKind::Q) {
    L.a_minus_offset = next;
    next += problem.constraints.size();
  }
  L.num_variables = next;
  return L;
}

/// Minimize the portfolio price over step-function hedges on the grid that
/// dominate the payoff at every grid point.
template <class T>
LinearProgram<T> build_dual(const TransportProblem<T>& problem, const PayoffGrid<T>& payoff) {
  detail::check_payoff(problem, payoff);
  const ProductGrid<T>& grid = payoff.grid;
  const std::size_t d = grid.dimension();
  const DualLayout L = dual_layout(problem, grid);
  const auto& cs = problem.constraints;

  LinearProgram<T> lp;
  lp.sense = Sense::Minimize;
  lp.objective.assign(L.num_variables, T(0));
  lp.bounds.assign(L.num_variables, VariableBounds<T>{});

  for (std::size_t j = 0; j < d; ++j) {
    const auto& axis = grid.axis(j);
    for (std::size_t k = 0; k < axis.size(); ++k) {
      switch (problem.kind) {
        case ClassKind::Q:
          lp.objective[L.f_offset[j] + k] = problem.marginals[j].mass_at(axis[k]);
          lp.bounds[L.f_offset[j] + k] = VariableBounds<T>::free();
          break;
        case ClassKind::Q0:
          lp.objective[L.f_offset[j] + k] = problem.marginals[j].mass_at(axis[k]);
          break;
        case ClassKind::Q1Band:
          lp.objective[L.f_offset[j] + k] = problem.bands[j].cdf_floor.mass_at(axis[k]);
          lp.objective[L.g_offset[j] + k] = -problem.bands[j].cdf_ceiling.mass_at(axis[k]);
          lp.bounds[L.f_offset[j] + k] = VariableBounds<T>::free();
          lp.bounds[L.g_offset[j] + k] = VariableBounds<T>::free();
          break;
      }
    }
  }
  for (std::size_t i = 0; i < cs.size(); ++i) {
    switch (problem.kind) {
      case ClassKind::Q:
        lp.objective[L.a_offset + i] = cs[i].pi_upper;
        lp.objective[L.a_minus_offset + i] = -cs[i].pi_lower;
        break;
      case ClassKind::Q0:
        lp.objective[L.a_offset + i] = cs[i].pi_upper;
        break;
      case ClassKind::Q1Band:
        lp.objective[L.a_offset + i] = cs[i].pi_lower;
        lp.bounds[L.a_offset + i] = VariableBounds<T>::nonpositive();
        break;
    }
  }

  if (problem.kind == ClassKind::Q1Band) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t off : {L.f_offset[j], L.g_offset[j]}) {
        for (std::size_t k = 1; k < grid.axis(j).size(); ++k) {
          std::vector<T> row(L.num_variables, T(0));
          row[off + k] = T(1);
          row[off + k - 1] = T(-1);
          lp.add_row(std::move(row), Relation::GreaterEqual, T(0));
        }
      }
    }
  }

  for (std::size_t x = 0; x < grid.size(); ++x) {
    std::vector<T> row(L.num_variables, T(0));
    auto idx = grid.unravel(x);
    for (std::size_t j = 0; j < d; ++j) {
      row[L.f_offset[j] + idx[j]] = T(1);
      if (problem.kind == ClassKind::Q1Band) row[L.g_offset[j] + idx[j]] = T(-1);
    }
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (!grid.in_lower_orthant(x, cs[i].corner)) continue;
      row[L.a_offset + i] = T(1);
      if (problem.kind == ClassKind::Q) row[L.a_minus_offset + i] = T(-1);
    }
    lp.add_row(std::move(row), Relation::GreaterEqual, payoff.values[x]);
  }
  return lp;
}

/// Reads a hedge out of a solution vector of build_dual's LP.
template <class T>
HedgePortfolio<T> hedge_from_dual_solution(const TransportProblem<T>& problem,
                                           const ProductGrid<T>& grid,
                                           const std::vector<T>& x) {
  const DualLayout L = dual_layout(problem, grid);
  HedgePortfolio<T> h;
  h.variant = dual_variant(problem.kind);
  h.axes = grid.axes();
  for (std::size_t j = 0; j < grid.dimension(); ++j) {
    const std::size_t len = grid.axis(j).size();
    h.f.emplace_back(x.begin() + L.f_offset[j], x.begin() + L.f_offset[j] + len);
    if (problem.kind == ClassKind::Q1Band)
      h.g.emplace_back(x.begin() + L.g_offset[j], x.begin() + L.g_offset[j] + len);
  }
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    T ai = x[L.a_offset + i];
    if (problem.kind == ClassKind::Q) ai -= x[L.a_minus_offset + i];
    h.a.push_back(ai);
  }
  h.price = portfolio_price(problem, h);
  return h;
}

enum class PriceSide { Primal, Dual, Both };

enum class PriceStatus { Optimal, ClassEmpty };

template <class T>
struct PriceResult {
  PriceStatus status = PriceStatus::Optimal;
  T value{};
  std::optional<T> primal_value;
  std::optional<T> dual_value;
  std::optional<JointMeasure<T>> plan;
  std::optional<HedgePortfolio<T>> hedge;
  std::size_t lp_iterations = 0;

  bool class_empty() const { return status == PriceStatus::ClassEmpty; }
};

/// Gap tolerated between the primal and dual optimal values.
template <class T>
T duality_gap_tolerance() {
  if constexpr (ScalarTraits<T>::exact) {
    return T(0);
  } else {
    return T(1e-8);
  }
}

/// Solves the primal transport problem and/or its superhedging dual. With
/// both sides requested the two optimal values must agree (exactly in
/// rational mode, to 1e-8 in float mode); disagreement throws.
template <class T>
PriceResult<T> price_bound(const TransportProblem<T>& problem, const PayoffGrid<T>& payoff,
                           PriceSide side = PriceSide::Both,
                           const SolverOptions<T>& options = {}) {
  PriceResult<T> result;
  const ProductGrid<T>& grid = payoff.grid;
  if (side != PriceSide::Dual) {
    auto sol = solve(build_primal(problem, payoff), options);
    result.lp_iterations += sol.iterations;
    if (sol.status == LpStatus::Infeasible) {
      result.status = PriceStatus::ClassEmpty;
      return result;
    }
    if (sol.status != LpStatus::Optimal)
      throw std::logic_error("bounded transport LP reported unbounded");
    result.primal_value = sol.objective_value;
    result.plan = JointMeasure<T>(grid, sol.primal, T(options.tolerance * T(1000)));
    result.value = sol.objective_value;
  }
  if (side != PriceSide::Primal) {
    auto sol = solve(build_dual(problem, payoff), options);
    result.lp_iterations += sol.iterations;
    if (sol.status == LpStatus::Unbounded) {
      // Unbounded superhedging price: the primal class is empty.
      result.status = PriceStatus::ClassEmpty;
      result.primal_value.reset();
      result.plan.reset();
      return result;
    }
    if (sol.status != LpStatus::Optimal)
      throw std::logic_error("superhedging LP infeasible; payoff must be bounded");
    result.dual_value = sol.objective_value;
    result.hedge = hedge_from_dual_solution(problem, grid, sol.primal);
    if (!result.primal_value) result.value = sol.objective_value;
  }
  if (result.primal_value && result.dual_value) {
    const T gap = abs_value(T(*result.primal_value - *result.dual_value));
    if (gap > duality_gap_tolerance<T>())
      throw std::logic_error("duality gap " + format_scalar(gap) + " exceeds tolerance");
  }
  return result;
}

template <class T>
struct ArbitrageReport {
  bool arbitrage_free = false;
  std::optional<JointMeasure<T>> witness;
  /// A portfolio dominating the constant 1 at nonpositive price.
  std::optional<HedgePortfolio<T>> portfolio;
};

/// The class Q is nonempty iff no uniform strong arbitrage exists. Returns a
/// witness measure in Q, or else an arbitrage portfolio.
template <class T>
ArbitrageReport<T> check_no_uniform_strong_arbitrage(const Marginals<T>& marginals,
                                                     const ConstraintSet<T>& constraints,
                                                     const SolverOptions<T>& options = {}) {
  TransportProblem<T> problem{ClassKind::Q, marginals, {}, constraints};
  problem.validate();
  const ProductGrid<T> grid = problem.grid();
  ArbitrageReport<T> report;

  auto feas = solve(build_primal(problem, PayoffGrid<T>::constant(grid, T(0))), options);
  if (feas.status == LpStatus::Optimal) {
    report.arbitrage_free = true;
    report.witness = JointMeasure<T>(grid, feas.primal, T(options.tolerance * T(1000)));
    return report;
  }

  // Cheapest superhedge of the constant 1, with the price floored at -1 so
  // the LP stays bounded. Any nonpositive optimum is an arbitrage.
  auto lp = build_dual(problem, PayoffGrid<T>::constant(grid, T(1)));
  lp.add_row(lp.objective, Relation::GreaterEqual, T(-1));
  auto sol = solve(lp, options);
  if (sol.status != LpStatus::Optimal || sol.objective_value > options.tolerance)
    throw std::logic_error("class Q infeasible but no arbitrage portfolio found");
  report.portfolio = hedge_from_dual_solution(problem, grid, sol.primal);
  return report;
}

/// Equality constraints encoding a known law of max(X_1, ..., X_d): one corner
/// (t, ..., t) with pi = nu_max((-inf, t]) per atom t of nu_max and per extra
/// breakpoint t (typically the marginal support points, which pins the law on
/// the whole grid).
template <class T>
ConstraintSet<T> max_distribution_constraints(const DiscreteMarginal<T>& nu_max, std::size_t d,
                                              const std::vector<T>& extra_breakpoints = {},
                                              const T& tol = default_tolerance<T>()) {
  if (d == 0) throw DimensionError("dimension must be positive");
  if (abs_value(T(nu_max.total_mass() - T(1))) > tol)
    throw InputError("law of the maximum must be a probability measure");
  std::vector<T> pts = nu_max.points();
  pts.insert(pts.end(), extra_breakpoints.begin(), extra_breakpoints.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  ConstraintSet<T> out;
  out.reserve(pts.size());
  for (const auto& t : pts) {
    out.push_back(OrthantConstraint<T>::equality(std::vector<T>(d, t),
                                                 clamp_unit(nu_max.cdf(t))));
  }
  return out;
}

/// Sorted union of all marginal support points, for max_distribution_constraints.
template <class T>
std::vector<T> all_support_points(const Marginals<T>& marginals) {
  std::vector<T> pts;
  for (const auto& m : marginals) {
    auto p = m.points();
    pts.insert(pts.end(), p.begin(), p.end());
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace ftb
