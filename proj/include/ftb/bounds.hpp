#pragma once

// Closed-form bounds on a joint cdf at a point: the classical Fréchet–Hoeffding
// bounds, the improved bounds under lower-orthant information, and the
// pointwise-sharp upper formulas for the two relaxed classes.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ftb/error.hpp"
#include "ftb/measures.hpp"
#include "ftb/scalar.hpp"

namespace ftb {

/// Information that the mass of the lower orthant (-inf, corner] lies in
/// [pi_lower, pi_upper]. Equal bounds encode a known joint-cdf value.
template <class T>
struct OrthantConstraint {
  std::vector<T> corner;
  T pi_lower;
  T pi_upper;

  OrthantConstraint() = default;
  OrthantConstraint(std::vector<T> c, T lower, T upper)
      : corner(std::move(c)), pi_lower(std::move(lower)), pi_upper(std::move(upper)) {
    if (pi_lower < T(0) || pi_upper < pi_lower || pi_upper > T(1))
      throw InputError("orthant constraint requires 0 <= pi_lower <= pi_upper <= 1");
  }

  static OrthantConstraint equality(std::vector<T> c, const T& pi) {
    return OrthantConstraint(std::move(c), pi, pi);
  }

  bool is_equality() const { return pi_lower == pi_upper; }
};

template <class T>
using ConstraintSet = std::vector<OrthantConstraint<T>>;

template <class T>
struct BoundPair {
  T lower;
  T upper;
};

namespace detail {

template <class T>
void check_dimensions(const Marginals<T>& marginals, const std::vector<T>& x) {
  if (marginals.empty()) throw DimensionError("at least one marginal is required");
  if (x.size() != marginals.size())
    throw DimensionError("point dimension " + std::to_string(x.size()) +
                         " does not match " + std::to_string(marginals.size()) + " marginals");
}

template <class T>
void check_dimensions(const Marginals<T>& marginals, const ConstraintSet<T>& constraints,
                      const std::vector<T>& x) {
  check_dimensions(marginals, x);
  for (const auto& c : constraints) {
    if (c.corner.size() != marginals.size())
      throw DimensionError("constraint corner dimension does not match the marginals");
  }
}

template <class T>
T min_marginal_cdf(const Marginals<T>& marginals, const std::vector<T>& x) {
  T best = marginals[0].cdf(x[0]);
  for (std::size_t i = 1; i < marginals.size(); ++i) {
    T v = marginals[i].cdf(x[i]);
    if (v < best) best = v;
  }
  return best;
}

}  // namespace detail

template <class T>
BoundPair<T> classical_fh_bounds(const Marginals<T>& marginals, const std::vector<T>& x) {
  detail::check_dimensions(marginals, x);
  T sum(0);
  for (std::size_t i = 0; i < marginals.size(); ++i) sum += marginals[i].cdf(x[i]);
  T lower = positive_part(T(sum - T(static_cast<long>(marginals.size()) - 1)));
  return {clamp_unit(lower), clamp_unit(detail::min_marginal_cdf(marginals, x))};
}

/// min_i F_i(x_i) ∧ min_s { pi_upper(s) + Σ_i (F_i(x_i) − F_i(s_i))⁺ }.
template <class T>
T improved_fh_upper(const Marginals<T>& marginals, const ConstraintSet<T>& constraints,
                    const std::vector<T>& x) {
  detail::check_dimensions(marginals, constraints, x);
  T best = detail::min_marginal_cdf(marginals, x);
  for (const auto& c : constraints) {
    T term = c.pi_upper;
    for (std::size_t i = 0; i < marginals.size(); ++i)
      term += positive_part(T(marginals[i].cdf(x[i]) - marginals[i].cdf(c.corner[i])));
    if (term < best) best = term;
  }
  return clamp_unit(best);
}

/// (Σ_i F_i(x_i) − (d−1))⁺ ∨ max_s { pi_lower(s) − Σ_i (F_i(s_i) − F_i(x_i))⁺ }.
template <class T>
T improved_fh_lower(const Marginals<T>& marginals, const ConstraintSet<T>& constraints,
                    const std::vector<T>& x) {
  detail::check_dimensions(marginals, constraints, x);
  T best = classical_fh_bounds(marginals, x).lower;
  for (const auto& c : constraints) {
    T term = c.pi_lower;
    for (std::size_t i = 0; i < marginals.size(); ++i)
      term -= positive_part(T(marginals[i].cdf(c.corner[i]) - marginals[i].cdf(x[i])));
    if (term > best) best = term;
  }
  return clamp_unit(best);
}

/// Exact maximum of F(x) over the zero-order relaxed class. Same value as
/// improved_fh_upper (with pi_upper as the orthant caps).
template <class T>
T sharp_upper_order0(const Marginals<T>& marginals, const ConstraintSet<T>& constraints,
                     const std::vector<T>& x) {
  return improved_fh_upper(marginals, constraints, x);
}

/// Index of the constraint attaining the order-1 formula, if the formula's
/// minimum is attained by a constraint strictly below min_i F_i(x_i). Ties go
/// to the marginal term (nullopt), then to the lowest constraint index.
template <class T>
std::optional<std::size_t> order1_binding_constraint(const Marginals<T>& marginals,
                                                     const ConstraintSet<T>& constraints,
                                                     const std::vector<T>& x) {
  detail::check_dimensions(marginals, constraints, x);
  T best = detail::min_marginal_cdf(marginals, x);
  std::optional<std::size_t> arg;
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    const auto& c = constraints[k];
    bool dominated = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (c.corner[i] < x[i]) {
        dominated = false;
        break;
      }
    }
    if (dominated && c.pi_upper < best) {
      best = c.pi_upper;
      arg = k;
    }
  }
  return arg;
}

/// Exact maximum of F(x) over the first-order relaxed class:
/// min_i F_i(x_i) ∧ min{ pi_upper(s) : x <= s componentwise }.
template <class T>
T sharp_upper_order1(const Marginals<T>& marginals, const ConstraintSet<T>& constraints,
                     const std::vector<T>& x) {
  auto binding = order1_binding_constraint(marginals, constraints, x);
  if (binding) return clamp_unit(constraints[*binding].pi_upper);
  return clamp_unit(detail::min_marginal_cdf(marginals, x));
}

}  // namespace ftb
