#pragma once

// Dense two-phase primal simplex with Bland's rule. Runs in exact rational
// arithmetic or in floating point with an absolute tolerance. Intended for the
// small instances that arise from discretized transport problems.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ftb/error.hpp"
#include "ftb/scalar.hpp"

namespace ftb {

enum class Sense { Maximize, Minimize };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

template <class T>
struct LpRow {
  std::vector<T> coeffs;
  Relation relation = Relation::LessEqual;
  T rhs{};
};

/// A missing bound is infinite. The default is x >= 0.
template <class T>
struct VariableBounds {
  std::optional<T> lower = T(0);
  std::optional<T> upper;

  static VariableBounds free() { return {std::nullopt, std::nullopt}; }
  static VariableBounds nonpositive() { return {std::nullopt, T(0)}; }
};

template <class T>
struct LinearProgram {
  Sense sense = Sense::Maximize;
  std::vector<T> objective;
  std::vector<LpRow<T>> rows;
  /// Either empty (every variable >= 0) or one entry per variable.
  std::vector<VariableBounds<T>> bounds;

  std::size_t num_variables() const { return objective.size(); }
  std::size_t num_rows() const { return rows.size(); }

  void add_row(std::vector<T> coeffs, Relation rel, T rhs) {
    rows.push_back({std::move(coeffs), rel, std::move(rhs)});
  }

  VariableBounds<T> bounds_of(std::size_t j) const {
    return bounds.empty() ? VariableBounds<T>{} : bounds[j];
  }

  void validate() const {
    const std::size_t n = objective.size();
    if (!bounds.empty() && bounds.size() != n)
      throw InputError("linear program: bounds size does not match objective");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].coeffs.size() != n)
        throw InputError("linear program: row " + std::to_string(i) +
                         " width does not match objective");
    }
  }
};

/// For an optimal solution `dual[i]` is the shadow price of row i, i.e. the
/// derivative of the optimal value with respect to rhs[i]. When the problem is
/// unbounded, `primal` holds an improving ray instead of a point.
template <class T>
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  T objective_value{};
  std::vector<T> primal;
  std::vector<T> dual;
  std::size_t iterations = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

template <class T>
struct SolverOptions {
  T tolerance = default_tolerance<T>();
  std::size_t max_iterations = 2'000'000;
};

namespace detail {

// Column of the internal standard form: original variable `var` contributes
// `sign * column` on top of a constant offset.
template <class T>
struct StdColumn {
  std::size_t var;
  int sign;
};

template <class T>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), a_(rows * cols, T(0)), rhs_(rows, T(0)), cost_(cols, T(0)),
        basis_(rows, 0), barred_(cols, false) {}

  T& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const T& at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  std::size_t m_, n_;
  std::vector<T> a_;
  std::vector<T> rhs_;
  std::vector<T> cost_;     // reduced costs of the current objective (maximize)
  T value_{};               // current objective value
  std::vector<std::size_t> basis_;
  std::vector<bool> barred_;
  std::size_t iterations_ = 0;

  void pivot(std::size_t r, std::size_t c) {
    const T inv = T(1) / at(r, c);
    for (std::size_t j = 0; j < n_; ++j) at(r, j) *= inv;
    rhs_[r] *= inv;
    at(r, c) = T(1);
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const T f = at(i, c);
      if (f == T(0)) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (at(r, j) != T(0)) at(i, j) -= f * at(r, j);
      }
      at(i, c) = T(0);
      rhs_[i] -= f * rhs_[r];
    }
    const T f = cost_[c];
    if (f != T(0)) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (at(r, j) != T(0)) cost_[j] -= f * at(r, j);
      }
      cost_[c] = T(0);
      value_ += f * rhs_[r];
    }
    basis_[r] = c;
    ++iterations_;
  }

  // Recomputes reduced costs for the objective `c` (maximize) given the basis.
  void price(const std::vector<T>& c) {
    cost_ = c;
    value_ = T(0);
    for (std::size_t i = 0; i < m_; ++i) {
      const T& cb = c[basis_[i]];
      if (cb == T(0)) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (at(i, j) != T(0)) cost_[j] -= cb * at(i, j);
      }
      value_ += cb * rhs_[i];
    }
  }

  enum class Outcome { Optimal, Unbounded };

  // Bland's rule: lowest-index improving column, ratio ties broken by the
  // lowest basic variable index.
  Outcome run(const T& tol, std::size_t max_iterations, std::size_t& unbounded_col) {
    while (true) {
      if (iterations_ > max_iterations)
        throw std::runtime_error("simplex iteration limit exceeded");
      std::size_t enter = n_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!barred_[j] && cost_[j] > tol) {
          enter = j;
          break;
        }
      }
      if (enter == n_) return Outcome::Optimal;
      std::size_t leave = m_;
      T best_ratio{};
      for (std::size_t i = 0; i < m_; ++i) {
        const T& coef = at(i, enter);
        if (!(coef > tol)) continue;
        T ratio = rhs_[i] / coef;
        if (leave == m_) {
          leave = i;
          best_ratio = ratio;
          continue;
        }
        const T diff = ratio - best_ratio;
        if (diff < -tol || (!(diff > tol) && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m_) {
        unbounded_col = enter;
        return Outcome::Unbounded;
      }
      pivot(leave, enter);
      // Keep float right-hand sides from drifting negative.
      if constexpr (!ScalarTraits<T>::exact) {
        for (auto& b : rhs_) {
          if (b < T(0) && b > -tol) b = T(0);
        }
      }
    }
  }
};

}  // namespace detail

template <class T>
LpSolution<T> solve(const LinearProgram<T>& lp, const SolverOptions<T>& options = {}) {
  lp.validate();
  const T& tol = options.tolerance;
  const std::size_t n_orig = lp.num_variables();

  // Map original variables onto nonnegative standard columns.
  std::vector<detail::StdColumn<T>> columns;
  std::vector<T> offset(n_orig, T(0));
  std::vector<std::pair<std::size_t, T>> upper_rows;  // (std column, capacity)
  for (std::size_t j = 0; j < n_orig; ++j) {
    const auto b = lp.bounds_of(j);
    if (b.lower) {
      offset[j] = *b.lower;
      columns.push_back({j, +1});
      if (b.upper) upper_rows.emplace_back(columns.size() - 1, T(*b.upper - *b.lower));
    } else if (b.upper) {
      offset[j] = *b.upper;
      columns.push_back({j, -1});
    } else {
      columns.push_back({j, +1});
      columns.push_back({j, -1});
    }
  }
  const std::size_t n_std = columns.size();

  struct StdRow {
    std::vector<T> coeffs;
    Relation rel;
    T rhs;
    bool flipped = false;
  };
  std::vector<StdRow> srows;
  srows.reserve(lp.num_rows() + upper_rows.size());
  for (const auto& row : lp.rows) {
    StdRow s{std::vector<T>(n_std, T(0)), row.relation, row.rhs};
    for (std::size_t c = 0; c < n_std; ++c) {
      const T& a = row.coeffs[columns[c].var];
      if (a != T(0)) s.coeffs[c] = columns[c].sign > 0 ? a : T(-a);
    }
    for (std::size_t j = 0; j < n_orig; ++j) {
      if (row.coeffs[j] != T(0) && offset[j] != T(0)) s.rhs -= row.coeffs[j] * offset[j];
    }
    srows.push_back(std::move(s));
  }
  for (const auto& [col, cap] : upper_rows) {
    StdRow s{std::vector<T>(n_std, T(0)), Relation::LessEqual, cap};
    s.coeffs[col] = T(1);
    srows.push_back(std::move(s));
  }
  for (auto& s : srows) {
    if (s.rhs < T(0)) {
      for (auto& a : s.coeffs) a = -a;
      s.rhs = -s.rhs;
      s.flipped = true;
      if (s.rel == Relation::LessEqual) s.rel = Relation::GreaterEqual;
      else if (s.rel == Relation::GreaterEqual) s.rel = Relation::LessEqual;
    }
  }

  // Column layout: [standard | slack/surplus | artificial].
  const std::size_t m = srows.size();
  std::vector<std::size_t> slack_col(m, SIZE_MAX), art_col(m, SIZE_MAX);
  std::size_t next = n_std;
  for (std::size_t i = 0; i < m; ++i) {
    if (srows[i].rel != Relation::Equal) slack_col[i] = next++;
  }
  const std::size_t first_art = next;
  for (std::size_t i = 0; i < m; ++i) {
    if (srows[i].rel != Relation::LessEqual) art_col[i] = next++;
  }
  const std::size_t n_total = next;

  detail::Tableau<T> tab(m, n_total);
  std::vector<std::size_t> init_col(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < n_std; ++c) tab.at(i, c) = srows[i].coeffs[c];
    tab.rhs_[i] = srows[i].rhs;
    if (srows[i].rel == Relation::LessEqual) {
      tab.at(i, slack_col[i]) = T(1);
      init_col[i] = slack_col[i];
    } else {
      if (srows[i].rel == Relation::GreaterEqual) tab.at(i, slack_col[i]) = T(-1);
      tab.at(i, art_col[i]) = T(1);
      init_col[i] = art_col[i];
    }
    tab.basis_[i] = init_col[i];
  }

  LpSolution<T> sol;
  std::size_t unbounded_col = 0;

  // Phase 1: maximize -(sum of artificials).
  if (first_art < n_total) {
    std::vector<T> c1(n_total, T(0));
    for (std::size_t j = first_art; j < n_total; ++j) c1[j] = T(-1);
    tab.price(c1);
    tab.run(tol, options.max_iterations, unbounded_col);
    if (tab.value_ < -tol) {
      sol.status = LpStatus::Infeasible;
      sol.iterations = tab.iterations_;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and keep their artificial at zero.
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis_[i] < first_art) continue;
      std::size_t pick = n_total;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (abs_value(tab.at(i, j)) > tol) {
          pick = j;
          break;
        }
      }
      if (pick != n_total) {
        tab.rhs_[i] = T(0);
        tab.pivot(i, pick);
      }
    }
    for (std::size_t j = first_art; j < n_total; ++j) tab.barred_[j] = true;
  }

  // Phase 2 on the original objective (minimization is negated).
  std::vector<T> c2(n_total, T(0));
  for (std::size_t c = 0; c < n_std; ++c) {
    T cj = lp.objective[columns[c].var];
    if (columns[c].sign < 0) cj = -cj;
    if (lp.sense == Sense::Minimize) cj = -cj;
    c2[c] = cj;
  }
  tab.price(c2);
  auto outcome = tab.run(tol, options.max_iterations, unbounded_col);
  sol.iterations = tab.iterations_;

  std::vector<T> std_value(n_total, T(0));
  for (std::size_t i = 0; i < m; ++i) std_value[tab.basis_[i]] = tab.rhs_[i];

  if (outcome == detail::Tableau<T>::Outcome::Unbounded) {
    sol.status = LpStatus::Unbounded;
    std::vector<T> dir(n_total, T(0));
    dir[unbounded_col] = T(1);
    for (std::size_t i = 0; i < m; ++i) dir[tab.basis_[i]] = -tab.at(i, unbounded_col);
    sol.primal.assign(n_orig, T(0));
    for (std::size_t c = 0; c < n_std; ++c) {
      if (dir[c] == T(0)) continue;
      sol.primal[columns[c].var] += columns[c].sign > 0 ? dir[c] : T(-dir[c]);
    }
    return sol;
  }

  sol.status = LpStatus::Optimal;
  sol.primal = offset;
  for (std::size_t c = 0; c < n_std; ++c) {
    if (std_value[c] == T(0)) continue;
    sol.primal[columns[c].var] += columns[c].sign > 0 ? std_value[c] : T(-std_value[c]);
  }
  T obj(0);
  for (std::size_t j = 0; j < n_orig; ++j) obj += lp.objective[j] * sol.primal[j];
  sol.objective_value = obj;

  sol.dual.assign(lp.num_rows(), T(0));
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    T y = -tab.cost_[init_col[i]];
    if (srows[i].flipped) y = -y;
    if (lp.sense == Sense::Minimize) y = -y;
    sol.dual[i] = y;
  }
  return sol;
}

}  // namespace ftb
