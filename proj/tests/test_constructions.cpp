#include <gtest/gtest.h>

#include "ftb/constructions.hpp"
#include "test_support.hpp"

using ftb::ClassKind;
using ftb::MembershipClass;
using ftb::OrthantConstraint;
using ftb::PayoffGrid;
using ftb::TransportProblem;
using ftb::ViolationKind;
using R = ftb::Rational;

TEST(Counterexample, TableData) {
  auto inst = ftb::counterexample_instance<R>();
  const auto& mu = inst.table_measure;
  EXPECT_EQ(mu.mass_at({1, 3}), R(3, 20));
  EXPECT_EQ(mu.total_mass(), R(1));
  EXPECT_EQ(mu.cdf({R(0), R(1)}), R(1, 20));
  EXPECT_TRUE(
      ftb::verify_membership(mu, MembershipClass::Exact, inst.marginals, inst.constraints).passed);
  auto d = ftb::counterexample_instance<double>();
  EXPECT_NEAR(d.table_measure.cdf({0.0, 1.0}), 0.05, 1e-12);
}

TEST(Counterexample, SeparationIsExact) {
  auto inst = ftb::counterexample_instance<R>();
  EXPECT_EQ(ftb::improved_fh_upper(inst.marginals, inst.constraints, inst.query_point), R(1, 10));
  TransportProblem<R> p{ClassKind::Q, inst.marginals, {}, inst.constraints};
  auto r = ftb::price_bound(p, PayoffGrid<R>::indicator(p.grid(), inst.query_point));
  EXPECT_EQ(r.value, R(1, 20));
}

TEST(Membership, Examples) {
  auto inst = ftb::counterexample_instance<R>();
  auto zero = ftb::JointMeasure<R>::zero(inst.table_measure.grid());
  EXPECT_TRUE(
      ftb::verify_membership(zero, MembershipClass::Order0, inst.marginals, inst.constraints).passed);
  auto zero_exact =
      ftb::verify_membership(zero, MembershipClass::Exact, inst.marginals, inst.constraints);
  EXPECT_FALSE(zero_exact.passed);
  EXPECT_EQ(zero_exact.violations.front().kind, ViolationKind::Mass);

  auto tightened = inst.constraints;
  tightened[3] = OrthantConstraint<R>::equality({R(1), R(1)}, R(1, 20));
  auto rep = ftb::verify_membership(inst.table_measure, MembershipClass::Order0, inst.marginals,
                                    tightened);
  ASSERT_FALSE(rep.passed);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].kind, ViolationKind::OrthantUpper);
  EXPECT_EQ(rep.violations[0].index, 3u);
  EXPECT_EQ(rep.violations[0].magnitude, R(1, 20));

  auto eq = ftb::verify_membership(inst.table_measure, MembershipClass::Exact, inst.marginals,
                                   tightened);
  ASSERT_EQ(eq.violations.size(), 1u);
  EXPECT_EQ(eq.violations[0].kind, ViolationKind::OrthantEquality);

  auto shifted = inst.marginals;
  shifted[0] = ftb::DiscreteMarginal<R>::probability(
      {{R(0), R(1, 10)}, {R(1), R(3, 20)}, {R(2), R(1, 10)}, {R(3), R(13, 20)}});
  auto o1 = ftb::verify_membership(inst.table_measure, MembershipClass::Order1, shifted,
                                   inst.constraints);
  ASSERT_FALSE(o1.passed);
  EXPECT_EQ(o1.violations[0].kind, ViolationKind::MarginalOrder1);
  EXPECT_EQ(*o1.violations[0].point, R(1));
  EXPECT_EQ(o1.violations[0].magnitude, R(1, 20));
  auto o0 = ftb::verify_membership(inst.table_measure, MembershipClass::Order0, shifted,
                                   inst.constraints);
  EXPECT_EQ(o0.violations[0].kind, ViolationKind::MarginalOrder0);
  auto ex = ftb::verify_membership(inst.table_measure, MembershipClass::Exact, shifted,
                                   inst.constraints);
  EXPECT_EQ(ex.violations[0].kind, ViolationKind::MarginalEquality);

  ftb::ConstraintSet<R> lower{OrthantConstraint<R>({R(1), R(1)}, R(1, 5), R(1, 2))};
  auto lo = ftb::verify_membership(inst.table_measure, MembershipClass::Exact, inst.marginals, lower);
  ASSERT_EQ(lo.violations.size(), 1u);
  EXPECT_EQ(lo.violations[0].kind, ViolationKind::OrthantLower);
  EXPECT_EQ(lo.violations[0].magnitude, R(1, 10));
  EXPECT_THROW(ftb::verify_membership(inst.table_measure, MembershipClass::Exact,
                                      ftb::Marginals<R>{inst.marginals[0]}, {}),
               ftb::DimensionError);
}

TEST(AttainOrder1, Examples) {
  auto inst = ftb::counterexample_instance<R>();
  auto mu = ftb::attain_order1(inst.marginals, inst.constraints, inst.query_point);
  EXPECT_EQ(mu.cdf(inst.query_point), R(1, 10));
  EXPECT_TRUE(
      ftb::verify_membership(mu, MembershipClass::Order1, inst.marginals, inst.constraints).passed);

  // No constraints and x at the top: F(x) = 1.
  auto top = ftb::attain_order1<R>(inst.marginals, {}, {R(3), R(3)});
  EXPECT_EQ(top.cdf({R(3), R(3)}), R(1));

  ftb::ConstraintSet<R> zero{OrthantConstraint<R>::equality({R(2), R(2)}, R(0))};
  auto z = ftb::attain_order1(inst.marginals, zero, {R(1), R(1)});
  EXPECT_EQ(z.cdf({R(1), R(1)}), R(0));
  EXPECT_TRUE(ftb::verify_membership(z, MembershipClass::Order1, inst.marginals, zero).passed);
}

TEST(AttainOrder0, Examples) {
  auto inst = ftb::counterexample_instance<R>();
  auto mu = ftb::attain_order0(inst.marginals, inst.constraints, inst.query_point);
  EXPECT_EQ(mu.cdf(inst.query_point), R(1, 10));
  EXPECT_TRUE(
      ftb::verify_membership(mu, MembershipClass::Order0, inst.marginals, inst.constraints).passed);
  auto free = ftb::attain_order0<R>(inst.marginals, {}, {R(1), R(2)});
  EXPECT_EQ(free.cdf({R(1), R(2)}), R(3, 10));
  ftb::ConstraintSet<R> cap{OrthantConstraint<R>({R(1), R(2)}, R(0), R(0))};
  EXPECT_EQ(ftb::attain_order0(inst.marginals, cap, {R(1), R(2)}).cdf({R(1), R(2)}), R(0));
}

// Whole-grid check of the construction: the cdf is min_j G_j(y_j).
TEST(AttainOrder1, RandomInstancesExact) {
  ftb::testing::Rng rng(101);
  for (int rep = 0; rep < 120; ++rep) {
    const std::size_t d = rep % 3 == 2 ? 3 : 2;
    auto m = ftb::testing::random_marginals<R>(rng, d, 5);
    auto cs = ftb::testing::random_upper_constraints(
        rng, m, static_cast<std::size_t>(ftb::testing::uniform_int(rng, 0, 4)));
    auto x = ftb::testing::random_corner(rng, m);
    auto mu = ftb::attain_order1(m, cs, x);
    EXPECT_EQ(ftb::joint_cdf_eval(mu, x), ftb::sharp_upper_order1(m, cs, x));
    auto rep_m = ftb::verify_membership(mu, MembershipClass::Order1, m, cs);
    EXPECT_TRUE(rep_m.passed);
    auto plan = ftb::order1_construction(m, cs, x);
    for (const auto& y : ftb::testing::probe_points(mu.grid())) {
      R expect = R(1);
      for (std::size_t j = 0; j < d; ++j) expect = std::min(expect, plan.g_cdf(j, y[j], x));
      EXPECT_EQ(mu.cdf(y), expect);
    }
  }
}

// The first-order class LP on a grid with the shift point appended: its
// maximum of F(x) equals the formula.
TEST(AttainOrder1, FormulaMatchesClassLp) {
  ftb::testing::Rng rng(103);
  for (int rep = 0; rep < 60; ++rep) {
    auto m = ftb::testing::random_marginals<R>(rng, 2, 4);
    auto cs = ftb::testing::random_upper_constraints(rng, m, 3);
    auto x = ftb::testing::random_corner(rng, m);
    const R r = ftb::attaining_shift_point(m, cs, x);
    std::vector<std::vector<R>> axes;
    for (std::size_t j = 0; j < 2; ++j) {
      auto a = m[j].points();
      a.push_back(x[j]);
      for (const auto& c : cs) a.push_back(c.corner[j]);
      a.push_back(r);
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
      axes.push_back(a);
    }
    ftb::ProductGrid<R> grid(axes);
    auto ind = PayoffGrid<R>::indicator(grid, x);
    auto sol = ftb::solve(ftb::build_order1_class_lp(m, cs, grid, ind.values));
    ASSERT_EQ(sol.status, ftb::LpStatus::Optimal);
    EXPECT_EQ(sol.objective_value, ftb::sharp_upper_order1(m, cs, x));
  }
}

TEST(AttainOrder0, RandomInstances) {
  ftb::testing::Rng rng(107);
  for (int rep = 0; rep < 80; ++rep) {
    const std::size_t d = rep % 4 == 3 ? 3 : 2;
    auto m = ftb::testing::random_marginals<R>(rng, d, d == 2 ? 5 : 3);
    auto cs = ftb::testing::random_upper_constraints(rng, m, 3);
    auto x = ftb::testing::random_corner(rng, m);
    auto mu = ftb::attain_order0(m, cs, x);
    EXPECT_EQ(mu.cdf(x), ftb::sharp_upper_order0(m, cs, x));
    EXPECT_TRUE(ftb::verify_membership(mu, MembershipClass::Order0, m, cs).passed);
  }
}

// Validity: LP-sampled members of each relaxed class stay below the sharp
// formulas on the whole probe grid.
TEST(Validity, SampledMembersBelowSharpFormulas) {
  ftb::testing::Rng rng(109);
  for (int rep = 0; rep < 40; ++rep) {
    auto m = ftb::testing::random_marginals<R>(rng, 2, 4);
    auto cs = ftb::testing::random_upper_constraints(rng, m, 3);
    TransportProblem<R> p{ClassKind::Q0, m, {}, cs};
    auto grid0 = p.grid();
    auto mu0 = ftb::testing::sample_member(
        rng, ftb::build_primal(p, PayoffGrid<R>::constant(grid0, R(0))), grid0);
    ASSERT_TRUE(ftb::verify_membership(mu0, MembershipClass::Order0, m, cs).passed);

    std::vector<std::vector<R>> axes;
    for (std::size_t j = 0; j < 2; ++j) {
      auto a = m[j].points();
      a.push_back(ftb::attaining_shift_point(m, cs, std::vector<R>{R(0), R(0)}));
      axes.push_back(a);
    }
    ftb::ProductGrid<R> grid1(axes);
    auto mu1 = ftb::testing::sample_member(
        rng, ftb::build_order1_class_lp(m, cs, grid1, std::vector<R>(grid1.size(), R(0))), grid1);
    ASSERT_TRUE(ftb::verify_membership(mu1, MembershipClass::Order1, m, cs).passed);

    for (const auto& x : ftb::testing::probe_points(grid1)) {
      EXPECT_LE(mu0.cdf(x), ftb::sharp_upper_order0(m, cs, x));
      EXPECT_LE(mu1.cdf(x), ftb::sharp_upper_order1(m, cs, x));
    }
  }
}
