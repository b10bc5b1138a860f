#include "ftb/cli/commands.hpp"

#include <spdlog/spdlog.h>

#include "ftb/boxhedge.hpp"
#include "ftb/constructions.hpp"

namespace ftb::cli {
namespace {

std::string yes_no(bool b) { return b ? "true" : "false"; }

RunReport start(const std::string& command, const CommandOptions& opt) {
  RunReport r;
  r.command = command;
  r.args = opt.args;
  r.mode = opt.exact ? "exact" : "float";
  return r;
}

template <class T>
SolverOptions<T> solver_options(const CommandOptions& opt) {
  SolverOptions<T> s;
  if constexpr (!ScalarTraits<T>::exact) s.tolerance = opt.tol;
  return s;
}

template <class T>
T tolerance(const CommandOptions& opt) {
  if constexpr (ScalarTraits<T>::exact) {
    return T(0);
  } else {
    return opt.tol;
  }
}

PriceSide parse_side(const std::string& s) {
  if (s == "primal") return PriceSide::Primal;
  if (s == "dual") return PriceSide::Dual;
  if (s == "both") return PriceSide::Both;
  throw InputError("--side must be primal, dual or both");
}

const char* class_label(ClassKind k) {
  switch (k) {
    case ClassKind::Q: return "Q";
    case ClassKind::Q0: return "Q0";
    case ClassKind::Q1Band: return "Q1_band";
  }
  return "?";
}

template <class T>
TransportProblem<T> make_problem(const Instance<T>& inst, ClassKind kind) {
  TransportProblem<T> p{kind, inst.marginals, {}, inst.constraints};
  if (kind == ClassKind::Q1Band) {
    if (!inst.bands) throw InputError("class order1 needs \"envelopes\" in the instance");
    p.bands = *inst.bands;
  }
  p.validate();
  return p;
}

template <class T>
RunReport bounds_impl(const InstanceFile& file, const CommandOptions& opt) {
  RunReport r = start("bounds", opt);
  if (opt.points.empty()) throw InputError("bounds needs at least one --point");
  auto inst = materialize<T>(file, tolerance<T>(opt));
  std::optional<ClassKind> kind;
  if (opt.class_name) kind = parse_class(*opt.class_name);
  for (const auto& text : opt.points) {
    auto x = parse_point<T>(split_point(text), inst.dimension());
    auto classical = classical_fh_bounds(inst.marginals, x);
    ResultRow row{"point", {}};
    row.add("point", join_point(x))
        .add("classical_lower", format_scalar(classical.lower))
        .add("classical_upper", format_scalar(classical.upper))
        .add("improved_lower", format_scalar(improved_fh_lower(inst.marginals, inst.constraints, x)))
        .add("improved_upper", format_scalar(improved_fh_upper(inst.marginals, inst.constraints, x)));
    if (!kind || *kind == ClassKind::Q0)
      row.add("sharp_upper_order0", format_scalar(sharp_upper_order0(inst.marginals, inst.constraints, x)));
    if (!kind || *kind == ClassKind::Q1Band)
      row.add("sharp_upper_order1", format_scalar(sharp_upper_order1(inst.marginals, inst.constraints, x)));
    r.results.push_back(std::move(row));
  }
  return r;
}

template <class T>
RunReport price_impl(const InstanceFile& file, const CommandOptions& opt) {
  RunReport r = start("price", opt);
  const ClassKind kind = parse_class(opt.class_name.value_or("exact"));
  const PriceSide side = parse_side(opt.side);
  auto inst = materialize<T>(file, tolerance<T>(opt));
  auto problem = make_problem(inst, kind);
  const ProductGrid<T> grid = problem.grid();

  PayoffGrid<T> payoff = [&] {
    if (opt.corner) return PayoffGrid<T>::indicator(grid, parse_point<T>(split_point(*opt.corner), grid.dimension()));
    if (!inst.payoff) throw InputError("price needs a payoff in the instance or --corner");
    return make_payoff(*inst.payoff, grid);
  }();

  auto res = price_bound(problem, payoff, side, solver_options<T>(opt));
  spdlog::debug("price: {} simplex pivots", res.lp_iterations);
  ResultRow row{"price", {}};
  row.add("class", class_label(kind)).add("side", opt.side);
  if (res.class_empty()) {
    r.status = "class_empty";
    r.exit_code = kClassEmpty;
    r.message = kind == ClassKind::Q
                    ? "class Q is empty: the market admits a uniform strong arbitrage"
                    : std::string("class ") + class_label(kind) + " is empty";
    row.add("status", "class_empty");
    r.results.push_back(std::move(row));
    return r;
  }
  row.add("status", "optimal").add("value", format_scalar(res.value));
  row.add("primal_value", res.primal_value ? format_scalar(*res.primal_value) : "");
  row.add("dual_value", res.dual_value ? format_scalar(*res.dual_value) : "");
  if (res.primal_value && res.dual_value)
    row.add("duality_gap", format_scalar(abs_value(T(*res.primal_value - *res.dual_value))));
  row.add("lp_iterations", std::to_string(res.lp_iterations));
  r.results.push_back(std::move(row));

  if (res.plan) {
    r.certificates["plan"] = measure_json(*res.plan);
    if (kind != ClassKind::Q1Band) {
      auto cls = kind == ClassKind::Q ? MembershipClass::Exact : MembershipClass::Order0;
      auto rep = verify_membership(*res.plan, cls, inst.marginals, inst.constraints,
                                   T(tolerance<T>(opt) * T(1000)));
      r.certificates["plan_membership"] =
          Json{{"class", to_string(cls)}, {"passed", rep.passed}, {"violations", violations_json(rep)}};
    }
  }
  if (res.hedge) {
    Json h = hedge_json(*res.hedge);
    h["dominates_payoff"] = res.hedge->dominates(payoff, problem.constraints, tolerance<T>(opt));
    h["sign_feasible"] = res.hedge->sign_feasible(tolerance<T>(opt));
    r.certificates["hedge"] = h;
  }
  return r;
}

template <class T>
RunReport hedge_box_impl(const InstanceFile& file, const CommandOptions& opt) {
  RunReport r = start("hedge-box", opt);
  auto inst = materialize<T>(file, tolerance<T>(opt));
  std::vector<T> corner;
  if (opt.corner) {
    corner = parse_point<T>(split_point(*opt.corner), inst.dimension());
  } else if (inst.payoff && inst.payoff->kind == "indicator") {
    corner = parse_point<T>(inst.payoff->corner, inst.dimension());
  } else {
    throw InputError("hedge-box needs --corner or an indicator payoff in the instance");
  }
  const Box<T> box{corner};
  ResultRow row{"box", {}};
  row.add("corner", join_point(corner));
  if (opt.value_only || inst.dimension() != 2) {
    if (!opt.value_only)
      throw DimensionError("the box hedge decomposition needs dimension 2 (instance has " +
                           std::to_string(inst.dimension()) + "); use --value-only");
    row.add("value", format_scalar(box_value(inst.marginals, inst.constraints, box)));
    r.results.push_back(std::move(row));
    return r;
  }
  auto res = box_hedge(inst.marginals, inst.constraints, box, tolerance<T>(opt));
  row.add("value", format_scalar(res.value))
      .add("form", to_string(res.form))
      .add("constraint", res.constraint ? std::to_string(*res.constraint) : "")
      .add("eta", format_scalar(eta_value(inst.marginals, inst.constraints, box)))
      .add("settled_at_first_step", yes_no(res.settled_at_first_step))
      .add("price", format_scalar(res.portfolio.price));
  r.results.push_back(std::move(row));

  TransportProblem<T> problem{ClassKind::Q0, inst.marginals, {}, inst.constraints};
  auto payoff = PayoffGrid<T>::indicator(problem.grid(), corner);
  Json h = hedge_json(res.portfolio);
  h["dominates_payoff"] = res.portfolio.dominates(payoff, inst.constraints, tolerance<T>(opt));
  h["sign_feasible"] = res.portfolio.sign_feasible(tolerance<T>(opt));
  r.certificates["portfolio"] = h;
  return r;
}

template <class T>
InstanceFile as_file(const Marginals<T>& marginals, const ConstraintSet<T>& constraints) {
  InstanceFile f;
  f.dimension = marginals.size();
  for (const auto& m : marginals) {
    RawAtoms atoms;
    for (const auto& a : m.atoms()) atoms.emplace_back(format_scalar(a.point), format_scalar(a.mass));
    f.marginals.push_back(std::move(atoms));
  }
  for (const auto& c : constraints) {
    RawConstraint rc;
    for (const auto& v : c.corner) rc.corner.push_back(format_scalar(v));
    rc.pi_lower = format_scalar(c.pi_lower);
    rc.pi_upper = format_scalar(c.pi_upper);
    f.constraints.push_back(std::move(rc));
  }
  return f;
}

template <class T>
RunReport counterexample_impl(const CommandOptions& opt) {
  RunReport r = start("counterexample", opt);
  auto inst = counterexample_instance<T>();
  const T bound = improved_fh_upper(inst.marginals, inst.constraints, inst.query_point);
  TransportProblem<T> problem{ClassKind::Q, inst.marginals, {}, inst.constraints};
  auto payoff = PayoffGrid<T>::indicator(problem.grid(), inst.query_point);
  auto res = price_bound(problem, payoff, PriceSide::Both, solver_options<T>(opt));
  auto member = verify_membership(inst.table_measure, MembershipClass::Exact, inst.marginals,
                                  inst.constraints, tolerance<T>(opt));
  const T table_cdf = inst.table_measure.cdf(inst.query_point);

  ResultRow row{"counterexample", {}};
  row.add("query_point", join_point(inst.query_point))
      .add("improved_fh_upper", format_scalar(bound))
      .add("exact_class_max", format_scalar(res.value))
      .add("table_cdf", format_scalar(table_cdf))
      .add("table_member", yes_no(member.passed))
      .add("separated", yes_no(res.value + tolerance<T>(opt) < bound));
  r.results.push_back(std::move(row));

  r.certificates["instance"] = instance_to_json(as_file(inst.marginals, inst.constraints));
  r.certificates["table_measure"] = measure_json(inst.table_measure);
  r.certificates["maximizer"] = measure_json(*res.plan);
  r.certificates["hedge"] = hedge_json(*res.hedge);
  return r;
}

template <class T>
RunReport arbitrage_impl(const InstanceFile& file, const CommandOptions& opt) {
  RunReport r = start("arbitrage", opt);
  auto inst = materialize<T>(file, tolerance<T>(opt));
  auto rep = check_no_uniform_strong_arbitrage(inst.marginals, inst.constraints,
                                               solver_options<T>(opt));
  ResultRow row{"arbitrage", {}};
  row.add("arbitrage_free", yes_no(rep.arbitrage_free))
      .add("verdict", rep.arbitrage_free ? "no arbitrage" : "uniform strong arbitrage");
  if (rep.witness) {
    auto m = verify_membership(*rep.witness, MembershipClass::Exact, inst.marginals,
                               inst.constraints, T(tolerance<T>(opt) * T(1000)));
    r.certificates["witness"] = measure_json(*rep.witness);
    r.certificates["witness_membership"] =
        Json{{"passed", m.passed}, {"violations", violations_json(m)}};
  }
  if (rep.portfolio) {
    row.add("portfolio_price", format_scalar(rep.portfolio->price));
    TransportProblem<T> problem{ClassKind::Q, inst.marginals, {}, inst.constraints};
    Json h = hedge_json(*rep.portfolio);
    h["dominates_one"] = rep.portfolio->dominates(PayoffGrid<T>::constant(problem.grid(), T(1)),
                                                  inst.constraints, tolerance<T>(opt));
    r.certificates["portfolio"] = h;
  }
  r.results.push_back(std::move(row));
  return r;
}

}  // namespace

ClassKind parse_class(const std::string& name) {
  if (name == "exact" || name == "Q") return ClassKind::Q;
  if (name == "order0" || name == "Q0") return ClassKind::Q0;
  if (name == "order1" || name == "Q1") return ClassKind::Q1Band;
  throw InputError("--class must be one of exact, order0, order1, Q, Q0, Q1");
}

RunReport cmd_bounds(const InstanceFile& inst, const CommandOptions& opt) {
  return opt.exact ? bounds_impl<Rational>(inst, opt) : bounds_impl<double>(inst, opt);
}

RunReport cmd_price(const InstanceFile& inst, const CommandOptions& opt) {
  return opt.exact ? price_impl<Rational>(inst, opt) : price_impl<double>(inst, opt);
}

RunReport cmd_hedge_box(const InstanceFile& inst, const CommandOptions& opt) {
  return opt.exact ? hedge_box_impl<Rational>(inst, opt) : hedge_box_impl<double>(inst, opt);
}

RunReport cmd_counterexample(const CommandOptions& opt) {
  return opt.exact ? counterexample_impl<Rational>(opt) : counterexample_impl<double>(opt);
}

RunReport cmd_arbitrage(const InstanceFile& inst, const CommandOptions& opt) {
  return opt.exact ? arbitrage_impl<Rational>(inst, opt) : arbitrage_impl<double>(inst, opt);
}

}  // namespace ftb::cli
