#pragma once

// Closed-form superhedging of a lower-orthant box indicator under short-selling
// constraints (the Q0 / Theta0 pair). Any dimension for the value; explicit
// three-form decomposition of the optimal hedge in dimension two.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ftb/bounds.hpp"
#include "ftb/error.hpp"
#include "ftb/measures.hpp"
#include "ftb/transport.hpp"

namespace ftb {

/// The box (-inf, corner_1] x ... x (-inf, corner_d].
template <class T>
struct Box {
  std::vector<T> corner;
};

enum class BoxHedgeForm { VerticalStrip, HorizontalStrip, BoxPlusStrips };

inline const char* to_string(BoxHedgeForm f) {
  switch (f) {
    case BoxHedgeForm::VerticalStrip: return "vertical_strip";
    case BoxHedgeForm::HorizontalStrip: return "horizontal_strip";
    case BoxHedgeForm::BoxPlusStrips: return "box_plus_strips";
  }
  return "?";
}

template <class T>
struct BoxHedgeResult {
  T value{};
  BoxHedgeForm form = BoxHedgeForm::VerticalStrip;
  std::optional<std::size_t> constraint;  // set for BoxPlusStrips
  HedgePortfolio<T> portfolio;
  /// Whether the top level of the recursion settled without a vertical cell.
  bool settled_at_first_step = false;
};

/// max over Q0 of mu(B): min over F_j(B_j) and, per constraint,
/// pi_upper + Σ_j nu_j((A_j, B_j]).
template <class T>
T box_value(const Marginals<T>& marginals, const ConstraintSet<T>& constraints,
            const Box<T>& box) {
  detail::check_dimensions(marginals, constraints, box.corner);
  T best = marginals[0].cdf(box.corner[0]);
  for (std::size_t j = 1; j < marginals.size(); ++j) {
    T v = marginals[j].cdf(box.corner[j]);
    if (v < best) best = v;
  }
  for (const auto& c : constraints) {
    T v = c.pi_upper;
    for (std::size_t j = 0; j < marginals.size(); ++j)
      v += marginals[j].interval_mass(c.corner[j], box.corner[j]);
    if (v < best) best = v;
  }
  return best;
}

namespace detail {

template <class T>
struct EtaChoice {
  T value;
  std::optional<std::size_t> constraint;  // nullopt: full horizontal strip
};

// Cheapest hedge of the box without vertical positions. Ties prefer a
// constraint (lowest index) over the horizontal strip.
template <class T>
EtaChoice<T> eta_choice(const Marginals<T>& marginals, const ConstraintSet<T>& constraints,
                        const T& b1, const T& b2, const T& tol) {
  EtaChoice<T> best{marginals[1].cdf(b2), std::nullopt};
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& c = constraints[i];
    if (c.corner[0] < b1) continue;
    T v = c.pi_upper + marginals[1].interval_mass(c.corner[1], b2);
    const bool better = best.constraint ? v < best.value - tol : v <= best.value + tol;
    if (better) best = {v, i};
  }
  return best;
}

template <class T>
void require_two_dimensions(const Marginals<T>& marginals, const ConstraintSet<T>& constraints,
                            const Box<T>& box) {
  if (marginals.size() != 2)
    throw DimensionError("box hedge decomposition is available in dimension 2 only");
  check_dimensions(marginals, constraints, box.corner);
}

}  // namespace detail

/// Value of the cheapest hedge of the box that uses no vertical marginal.
template <class T>
T eta_value(const Marginals<T>& marginals, const ConstraintSet<T>& constraints,
            const Box<T>& box) {
  detail::require_two_dimensions(marginals, constraints, box);
  return detail::eta_choice(marginals, constraints, box.corner[0], box.corner[1], T(0)).value;
}

/// Optimal Theta0 hedge of the box indicator in dimension two, built by
/// peeling vertical cells from the right edge of the box until settling with
/// a horizontal-only hedge. The result is a full vertical strip, a full
/// horizontal strip, or one constraint box plus the strips adjacent to it.
template <class T>
BoxHedgeResult<T> box_hedge(const Marginals<T>& marginals, const ConstraintSet<T>& constraints,
                            const Box<T>& box, const T& tol = default_tolerance<T>()) {
  detail::require_two_dimensions(marginals, constraints, box);
  const T& b1 = box.corner[0];
  const T& b2 = box.corner[1];

  // Breakpoints on the first axis up to and including b1.
  std::vector<T> levels;
  for (const auto& c : constraints)
    if (c.corner[0] < b1) levels.push_back(c.corner[0]);
  levels.push_back(b1);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const std::size_t top = levels.size();

  // value[k]: optimal price for the box truncated at levels[k]; peel[k]: the
  // optimum buys the vertical cell (levels[k-1], levels[k]].
  std::vector<T> value(top);
  std::vector<bool> peel(top, false);
  std::vector<detail::EtaChoice<T>> eta;
  eta.reserve(top);
  for (std::size_t k = 0; k < top; ++k) {
    eta.push_back(detail::eta_choice(marginals, constraints, levels[k], b2, tol));
    T cell = k == 0 ? marginals[0].cdf(levels[0])
                    : marginals[0].interval_mass(levels[k - 1], levels[k]);
    T peeled = k == 0 ? cell : T(cell + value[k - 1]);
    if (peeled < eta[k].value - tol) {
      value[k] = peeled;
      peel[k] = true;
    } else {
      value[k] = eta[k].value;
    }
  }

  // Unroll from the top: count the peeled cells, then settle.
  std::size_t k = top;
  while (k > 0 && peel[k - 1]) --k;

  BoxHedgeResult<T> result;
  result.value = value[top - 1];
  result.settled_at_first_step = !peel[top - 1];

  TransportProblem<T> problem{ClassKind::Q0, marginals, {}, constraints};
  const ProductGrid<T> grid = problem.grid();
  HedgePortfolio<T>& h = result.portfolio;
  h.variant = HedgeVariant::Theta0;
  h.axes = grid.axes();
  h.f = {std::vector<T>(grid.axis(0).size(), T(0)), std::vector<T>(grid.axis(1).size(), T(0))};
  h.a.assign(constraints.size(), T(0));

  auto fill = [](std::vector<T>& f, const std::vector<T>& axis, const std::optional<T>& lo,
                 const T& hi) {
    for (std::size_t n = 0; n < axis.size(); ++n) {
      if ((!lo || *lo < axis[n]) && !(hi < axis[n])) f[n] = T(1);
    }
  };

  if (k == 0) {
    result.form = BoxHedgeForm::VerticalStrip;
    fill(h.f[0], h.axes[0], std::nullopt, b1);
  } else {
    const auto& settle = eta[k - 1];
    const bool peeled_any = k < top;
    if (peeled_any) fill(h.f[0], h.axes[0], levels[k - 1], b1);
    if (settle.constraint) {
      const auto& c = constraints[*settle.constraint];
      result.form = BoxHedgeForm::BoxPlusStrips;
      result.constraint = settle.constraint;
      h.a[*settle.constraint] = T(1);
      fill(h.f[1], h.axes[1], c.corner[1], b2);
      if (peeled_any && !(c.corner[0] == levels[k - 1]))
        throw std::logic_error("box hedge: constraint box does not abut the vertical strip");
    } else {
      if (peeled_any)
        throw std::logic_error("box hedge: horizontal strip combined with vertical cells");
      result.form = BoxHedgeForm::HorizontalStrip;
      fill(h.f[1], h.axes[1], std::nullopt, b2);
    }
  }
  h.price = portfolio_price(problem, h);
  return result;
}

}  // namespace ftb
