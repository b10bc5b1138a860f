#include <gtest/gtest.h>

#include "ftb/constructions.hpp"
#include "ftb/transport.hpp"
#include "test_support.hpp"

using ftb::ClassKind;
using ftb::DiscreteMarginal;
using ftb::OrthantConstraint;
using ftb::PayoffGrid;
using ftb::PriceSide;
using ftb::TransportProblem;
using R = ftb::Rational;

namespace {

DiscreteMarginal<R> uniform(std::initializer_list<long> pts) {
  std::vector<ftb::Atom<R>> atoms;
  for (long p : pts) atoms.push_back({R(p), R(1, static_cast<long>(pts.size()))});
  return DiscreteMarginal<R>::probability(atoms);
}

// Envelopes around a marginal: the ceiling moves part of every atom to the
// smallest point (cdf goes up), the floor moves part to the largest point.
ftb::MarginalBand<R> band_around(ftb::testing::Rng& rng, const DiscreteMarginal<R>& m) {
  auto shift = [&](bool down) {
    const R frac(ftb::testing::uniform_int(rng, 0, 4), 10);
    std::vector<ftb::Atom<R>> atoms = m.atoms();
    R moved(0);
    for (auto& a : atoms) {
      moved += a.mass * frac;
      a.mass -= a.mass * frac;
    }
    (down ? atoms.front() : atoms.back()).mass += moved;
    return DiscreteMarginal<R>::probability(atoms);
  };
  ftb::MarginalBand<R> b;
  b.cdf_ceiling = shift(true);
  b.cdf_floor = shift(false);
  return b;
}

template <class T>
void expect_hedge_valid(const TransportProblem<T>& p, const PayoffGrid<T>& payoff,
                        const ftb::PriceResult<T>& r, const T& tol) {
  ASSERT_TRUE(r.hedge);
  EXPECT_TRUE(r.hedge->dominates(payoff, p.constraints, tol));
  EXPECT_TRUE(r.hedge->sign_feasible(tol));
  EXPECT_LE(ftb::abs_value(T(r.hedge->price - *r.dual_value)), tol * T(10));
}

}  // namespace

TEST(Transport, SeparationExactClass) {
  auto inst = ftb::counterexample_instance<R>();
  TransportProblem<R> p{ClassKind::Q, inst.marginals, {}, inst.constraints};
  auto payoff = PayoffGrid<R>::indicator(p.grid(), inst.query_point);
  auto r = ftb::price_bound(p, payoff);
  ASSERT_FALSE(r.class_empty());
  EXPECT_EQ(*r.primal_value, R(1, 20));
  EXPECT_EQ(*r.dual_value, R(1, 20));
  EXPECT_EQ(r.plan->cdf(inst.query_point), R(1, 20));
  EXPECT_TRUE(ftb::verify_membership(*r.plan, ftb::MembershipClass::Exact, inst.marginals,
                                     inst.constraints)
                  .passed);
  expect_hedge_valid(p, payoff, r, R(0));
}

TEST(Transport, Q0Examples) {
  auto inst = ftb::counterexample_instance<R>();
  TransportProblem<R> p{ClassKind::Q0, inst.marginals, {}, inst.constraints};
  auto zero = ftb::price_bound(p, PayoffGrid<R>::constant(p.grid(), R(0)));
  EXPECT_EQ(zero.value, R(0));
  TransportProblem<R> free{ClassKind::Q0, inst.marginals, {}, {}};
  auto r = ftb::price_bound(free, PayoffGrid<R>::indicator(free.grid(), {R(0), R(1)}));
  EXPECT_EQ(r.value, R(1, 10));
  for (long m = 0; m <= 3; ++m) {
    auto c = ftb::price_bound(p, PayoffGrid<R>::constant(p.grid(), R(m)), PriceSide::Dual);
    EXPECT_EQ(c.value, R(m));
  }
}

TEST(Transport, BoxInstanceTheta0) {
  auto u = uniform({0, 1, 2, 3});
  TransportProblem<R> p{ClassKind::Q0, {u, u}, {}, {OrthantConstraint<R>({R(1), R(3)}, R(0), R(3, 10))}};
  auto r = ftb::price_bound(p, PayoffGrid<R>::indicator(p.grid(), {R(2), R(2)}), PriceSide::Dual);
  EXPECT_EQ(r.value, R(11, 20));
}

TEST(Transport, ZeroPayoffZeroHedge) {
  auto inst = ftb::counterexample_instance<R>();
  TransportProblem<R> p{ClassKind::Q, inst.marginals, {}, inst.constraints};
  auto r = ftb::price_bound(p, PayoffGrid<R>::constant(p.grid(), R(0)));
  EXPECT_EQ(r.value, R(0));
  EXPECT_EQ(r.hedge->price, R(0));
}

TEST(Transport, InputErrors) {
  auto inst = ftb::counterexample_instance<R>();
  TransportProblem<R> p{ClassKind::Q, inst.marginals, {}, inst.constraints};
  ftb::ProductGrid<R> other({{R(0), R(1)}, {R(0)}});
  EXPECT_THROW(ftb::price_bound(p, PayoffGrid<R>::constant(other, R(0))), ftb::InputError);
  auto u = uniform({0, 1});
  DiscreteMarginal<R> left({{R(0), R(1)}, {R(1), R(0)}}, true);
  // floor must have the lower cdf; swapping the envelopes violates the order.
  TransportProblem<R> bad{ClassKind::Q1Band, {}, {{left, u}}, {}};
  EXPECT_THROW(bad.validate(), ftb::InputError);
  TransportProblem<R> sub{ClassKind::Q, {u.scaled(R(1, 2))}, {}, {}};
  EXPECT_THROW(sub.validate(), ftb::InputError);
}

// Strong duality and certificate checks on random instances of the three
// class/dual pairs, exact and float.
TEST(Transport, RandomStrongDualityAllClasses) {
  ftb::testing::Rng rng(53);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t d = rep % 3 == 2 ? 3 : 2;
    auto mu = ftb::testing::random_joint<R>(rng, d, d == 2 ? 4 : 3);
    auto m = ftb::testing::marginals_of(mu);
    // Q: constraints read off mu, so the class is nonempty.
    {
      auto cs = ftb::testing::constraints_from_measure(rng, mu, m, 3, rep % 2 == 0);
      TransportProblem<R> p{ClassKind::Q, m, {}, cs};
      auto payoff = ftb::testing::random_payoff(rng, p.grid());
      auto r = ftb::price_bound(p, payoff);
      ASSERT_FALSE(r.class_empty());
      EXPECT_EQ(*r.primal_value, *r.dual_value);
      EXPECT_EQ(r.plan->integrate(payoff.values), r.value);
      EXPECT_GE(r.value, mu.integrate(payoff.values));
      EXPECT_TRUE(ftb::verify_membership(*r.plan, ftb::MembershipClass::Exact, m, cs).passed);
      expect_hedge_valid(p, payoff, r, R(0));
    }
    // Q0: arbitrary upper prices.
    {
      auto cs = ftb::testing::random_upper_constraints(rng, m, 3);
      TransportProblem<R> p{ClassKind::Q0, m, {}, cs};
      auto payoff = ftb::testing::random_payoff(rng, p.grid());
      auto r = ftb::price_bound(p, payoff);
      EXPECT_EQ(*r.primal_value, *r.dual_value);
      EXPECT_TRUE(ftb::verify_membership(*r.plan, ftb::MembershipClass::Order0, m, cs).passed);
      expect_hedge_valid(p, payoff, r, R(0));
    }
    // Q1_band: envelopes around mu's marginals, lower prices below mu.
    {
      std::vector<ftb::MarginalBand<R>> bands;
      for (const auto& mj : m) bands.push_back(band_around(rng, mj));
      auto cs = ftb::testing::constraints_from_measure(rng, mu, m, 3, false);
      TransportProblem<R> p{ClassKind::Q1Band, {}, bands, cs};
      auto payoff = ftb::testing::random_payoff(rng, p.grid());
      auto r = ftb::price_bound(p, payoff);
      ASSERT_FALSE(r.class_empty());
      EXPECT_EQ(*r.primal_value, *r.dual_value);
      expect_hedge_valid(p, payoff, r, R(0));
      const auto grid = p.grid();
      for (std::size_t j = 0; j < d; ++j) {
        auto pj = r.plan->marginal(j);
        for (const auto& t : grid.axis(j)) {
          EXPECT_LE(bands[j].cdf_floor.cdf(t), pj.cdf(t));
          EXPECT_LE(pj.cdf(t), bands[j].cdf_ceiling.cdf(t));
        }
      }
      for (const auto& c : cs) EXPECT_GE(r.plan->cdf(c.corner), c.pi_lower);
    }
  }
}

TEST(Transport, FloatAgreesWithExact) {
  ftb::testing::Rng rng(59);
  ftb::testing::Rng rng_f(59);
  for (int rep = 0; rep < 40; ++rep) {
    auto m = ftb::testing::random_marginals<R>(rng, 2, 5);
    auto cs = ftb::testing::random_upper_constraints(rng, m, 3);
    auto mf = ftb::testing::random_marginals<double>(rng_f, 2, 5);
    auto csf = ftb::testing::random_upper_constraints(rng_f, mf, 3);
    TransportProblem<R> p{ClassKind::Q0, m, {}, cs};
    TransportProblem<double> pf{ClassKind::Q0, mf, {}, csf};
    auto payoff = ftb::testing::random_payoff(rng, p.grid());
    auto payoff_f = ftb::testing::random_payoff(rng_f, pf.grid());
    auto r = ftb::price_bound(p, payoff);
    auto rf = ftb::price_bound(pf, payoff_f);
    EXPECT_NEAR(ftb::to_double(r.value), rf.value, 1e-9);
    EXPECT_TRUE(rf.hedge->dominates(payoff_f, csf, 1e-9));
  }
}

TEST(Transport, Q0IndicatorEqualsSharpOrder0) {
  ftb::testing::Rng rng(61);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t d = rep % 4 == 3 ? 3 : 2;
    auto m = ftb::testing::random_marginals<R>(rng, d, d == 2 ? 5 : 3);
    auto cs = ftb::testing::random_upper_constraints(rng, m, 3);
    TransportProblem<R> p{ClassKind::Q0, m, {}, cs};
    auto x = ftb::testing::random_corner(rng, m);
    auto r = ftb::price_bound(p, PayoffGrid<R>::indicator(p.grid(), x), PriceSide::Primal);
    EXPECT_EQ(r.value, ftb::sharp_upper_order0(m, cs, x));
  }
}

TEST(Transport, MonotoneInPriceBounds) {
  ftb::testing::Rng rng(67);
  for (int rep = 0; rep < 40; ++rep) {
    auto mu = ftb::testing::random_joint<R>(rng, 2, 4);
    auto m = ftb::testing::marginals_of(mu);
    auto cs = ftb::testing::constraints_from_measure(rng, mu, m, 3, true);
    TransportProblem<R> p{ClassKind::Q, m, {}, cs};
    auto payoff = ftb::testing::random_payoff(rng, p.grid());
    R base = ftb::price_bound(p, payoff, PriceSide::Primal).value;
    auto wider = cs;
    for (auto& c : wider) {
      c.pi_lower = ftb::positive_part(R(c.pi_lower - R(ftb::testing::uniform_int(rng, 0, 100), 1000)));
      c.pi_upper = std::min(R(1), R(c.pi_upper + R(ftb::testing::uniform_int(rng, 0, 100), 1000)));
    }
    TransportProblem<R> pw{ClassKind::Q, m, {}, wider};
    EXPECT_GE(ftb::price_bound(pw, payoff, PriceSide::Primal).value, base);
  }
}

// With envelopes equal to the marginals and no constraints the band class is
// the Fréchet class, so supermodular nondecreasing payoffs are maximized by
// the comonotone coupling.
TEST(Transport, Q1BandReductionToComonotone) {
  ftb::testing::Rng rng(71);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t d = rep % 4 == 3 ? 3 : 2;
    auto m = ftb::testing::random_marginals<R>(rng, d, d == 2 ? 5 : 3);
    std::vector<ftb::MarginalBand<R>> bands;
    for (const auto& mj : m) bands.push_back({mj, mj});
    TransportProblem<R> p{ClassKind::Q1Band, {}, bands, {}};
    auto grid = p.grid();
    // f(x) = Π_j g_j(x_j) + Σ_j h_j(x_j), g_j >= 0 and h_j nondecreasing.
    std::vector<std::vector<R>> g(d), h(d);
    for (std::size_t j = 0; j < d; ++j) {
      R gv(ftb::testing::uniform_int(rng, 0, 2)), hv(ftb::testing::uniform_int(rng, -3, 0));
      for (std::size_t k = 0; k < grid.axis(j).size(); ++k) {
        gv += R(ftb::testing::uniform_int(rng, 0, 3));
        hv += R(ftb::testing::uniform_int(rng, 0, 3));
        g[j].push_back(gv);
        h[j].push_back(hv);
      }
    }
    std::vector<R> values;
    for (std::size_t x = 0; x < grid.size(); ++x) {
      auto idx = grid.unravel(x);
      R prod(1), sum(0);
      for (std::size_t j = 0; j < d; ++j) {
        prod *= g[j][idx[j]];
        sum += h[j][idx[j]];
      }
      values.push_back(prod + sum);
    }
    auto payoff = PayoffGrid<R>::sampled(grid, values);
    auto r = ftb::price_bound(p, payoff);
    EXPECT_EQ(r.value, ftb::testing::comonotone_value(m, payoff));
  }
}

TEST(Arbitrage, PointMassInstance) {
  DiscreteMarginal<R> delta({{R(0), R(1)}}, true);
  ftb::ConstraintSet<R> cs{OrthantConstraint<R>({R(0), R(0)}, R(0), R(1, 2))};
  auto rep = ftb::check_no_uniform_strong_arbitrage<R>({delta, delta}, cs);
  EXPECT_FALSE(rep.arbitrage_free);
  ASSERT_TRUE(rep.portfolio);
  TransportProblem<R> p{ClassKind::Q, {delta, delta}, {}, cs};
  EXPECT_LE(rep.portfolio->price, R(0));
  EXPECT_EQ(rep.portfolio->price, ftb::portfolio_price(p, *rep.portfolio));
  EXPECT_TRUE(rep.portfolio->dominates(PayoffGrid<R>::constant(p.grid(), R(1)), cs, R(0)));
  EXPECT_TRUE(ftb::price_bound(p, PayoffGrid<R>::constant(p.grid(), R(0))).class_empty());

  auto repf = ftb::check_no_uniform_strong_arbitrage<double>(
      {DiscreteMarginal<double>({{0.0, 1.0}}, true), DiscreteMarginal<double>({{0.0, 1.0}}, true)},
      {OrthantConstraint<double>({0.0, 0.0}, 0.0, 0.5)});
  EXPECT_FALSE(repf.arbitrage_free);
  EXPECT_LE(repf.portfolio->price, 1e-9);
}

TEST(Arbitrage, SeparationAndGeneratedInstancesAreFree) {
  auto inst = ftb::counterexample_instance<R>();
  auto rep = ftb::check_no_uniform_strong_arbitrage(inst.marginals, inst.constraints);
  ASSERT_TRUE(rep.arbitrage_free);
  EXPECT_TRUE(ftb::verify_membership(*rep.witness, ftb::MembershipClass::Exact, inst.marginals,
                                     inst.constraints)
                  .passed);
  ftb::testing::Rng rng(73);
  for (int k = 0; k < 30; ++k) {
    auto mu = ftb::testing::random_joint<R>(rng, 2 + k % 2, 3);
    auto m = ftb::testing::marginals_of(mu);
    auto cs = ftb::testing::constraints_from_measure(rng, mu, m, 4, true);
    auto r = ftb::check_no_uniform_strong_arbitrage(m, cs);
    ASSERT_TRUE(r.arbitrage_free);
    EXPECT_TRUE(ftb::verify_membership(*r.witness, ftb::MembershipClass::Exact, m, cs).passed);
  }
}

TEST(MaxDistribution, Examples) {
  DiscreteMarginal<R> d3({{R(3), R(1)}}, true);
  auto cs = ftb::max_distribution_constraints(d3, 2);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].corner, (std::vector<R>{R(3), R(3)}));
  EXPECT_EQ(cs[0].pi_upper, R(1));
  EXPECT_TRUE(cs[0].is_equality());
  auto below = ftb::max_distribution_constraints(d3, 2, {R(1), R(2)});
  ASSERT_EQ(below.size(), 3u);
  EXPECT_EQ(below[0].pi_upper, R(0));
  EXPECT_EQ(below[1].pi_upper, R(0));

  // Independent uniform{0,1} pair: the max has law 0.25 δ0 + 0.75 δ1.
  auto u = uniform({0, 1});
  DiscreteMarginal<R> nu_max({{R(0), R(1, 4)}, {R(1), R(3, 4)}}, true);
  ftb::Marginals<R> m{u, u};
  auto mcs = ftb::max_distribution_constraints(nu_max, 2, ftb::all_support_points(m));
  TransportProblem<R> p{ClassKind::Q, m, {}, mcs};
  auto grid = p.grid();
  ftb::testing::Rng rng(79);
  for (int k = 0; k < 20; ++k) {
    auto payoff = ftb::testing::random_payoff(rng, grid);
    R indep(0);
    for (auto v : payoff.values) indep += v / 4;
    auto r = ftb::price_bound(p, payoff);
    ASSERT_FALSE(r.class_empty());
    EXPECT_EQ(r.value, indep);
  }

  DiscreteMarginal<R> d0({{R(0), R(1)}}, true);
  TransportProblem<R> empty{ClassKind::Q, m, {},
                            ftb::max_distribution_constraints(d0, 2, ftb::all_support_points(m))};
  EXPECT_TRUE(
      ftb::price_bound(empty, PayoffGrid<R>::constant(grid, R(0))).class_empty());
  EXPECT_FALSE(ftb::check_no_uniform_strong_arbitrage(m, empty.constraints).arbitrage_free);
  EXPECT_THROW(ftb::max_distribution_constraints(u.scaled(R(1, 2)), 2), ftb::InputError);
}
