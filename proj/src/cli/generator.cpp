#include <random>
#include <string>

#include "ftb/cli/commands.hpp"

namespace ftb::cli {
namespace {

// k/1000 as a short decimal string.
std::string milli(long k) {
  if (k % 1000 == 0) return std::to_string(k / 1000);
  std::string frac = std::to_string(1000 + k % 1000).substr(1);
  while (frac.back() == '0') frac.pop_back();
  return std::to_string(k / 1000) + "." + frac;
}

}  // namespace

InstanceFile generate_instance(const GenOptions& opt) {
  if (opt.dim < 1 || opt.dim > 6) throw InputError("gen: dim must be between 1 and 6");
  if (opt.grid < 1 || opt.grid > 12) throw InputError("gen: grid must be between 1 and 12");
  if (opt.nconstraints > 1000) throw InputError("gen: at most 1000 constraints");

  std::mt19937_64 rng(opt.seed);
  std::size_t cells = 1;
  for (std::size_t j = 0; j < opt.dim; ++j) cells *= opt.grid;

  // Drop 1000 unit masses on random cells (row-major, last axis fastest).
  std::vector<long> counts(cells, 0);
  std::uniform_int_distribution<std::size_t> cell(0, cells - 1);
  for (int unit = 0; unit < 1000; ++unit) ++counts[cell(rng)];

  auto coords = [&](std::size_t flat) {
    std::vector<std::size_t> idx(opt.dim);
    for (std::size_t j = opt.dim; j-- > 0;) {
      idx[j] = flat % opt.grid;
      flat /= opt.grid;
    }
    return idx;
  };

  InstanceFile inst;
  inst.dimension = opt.dim;
  for (std::size_t j = 0; j < opt.dim; ++j) {
    std::vector<long> axis(opt.grid, 0);
    for (std::size_t f = 0; f < cells; ++f) axis[coords(f)[j]] += counts[f];
    RawAtoms atoms;
    for (std::size_t k = 0; k < opt.grid; ++k) atoms.emplace_back(std::to_string(k), milli(axis[k]));
    inst.marginals.push_back(std::move(atoms));
  }

  std::uniform_int_distribution<std::size_t> coord(0, opt.grid - 1);
  auto random_corner = [&] {
    std::vector<std::size_t> c(opt.dim);
    for (auto& v : c) v = coord(rng);
    return c;
  };
  for (std::size_t i = 0; i < opt.nconstraints; ++i) {
    auto corner = random_corner();
    long mass = 0;
    for (std::size_t f = 0; f < cells; ++f) {
      auto idx = coords(f);
      bool inside = true;
      for (std::size_t j = 0; j < opt.dim; ++j) inside = inside && idx[j] <= corner[j];
      if (inside) mass += counts[f];
    }
    RawConstraint rc;
    for (auto v : corner) rc.corner.push_back(std::to_string(v));
    rc.pi_lower = rc.pi_upper = milli(mass);
    inst.constraints.push_back(std::move(rc));
  }

  RawPayoff payoff;
  payoff.kind = "indicator";
  for (auto v : random_corner()) payoff.corner.push_back(std::to_string(v));
  inst.payoff = std::move(payoff);
  return inst;
}

RunReport cmd_gen(const GenOptions& opt) {
  RunReport r;
  r.command = "gen";
  r.mode = "exact";
  InstanceFile inst = generate_instance(opt);
  ResultRow row{"instance", {}};
  row.add("seed", std::to_string(opt.seed))
      .add("dim", std::to_string(opt.dim))
      .add("grid", std::to_string(opt.grid))
      .add("nconstraints", std::to_string(opt.nconstraints));
  r.results.push_back(std::move(row));
  r.certificates["instance"] = instance_to_json(inst);
  return r;
}

}  // namespace ftb::cli
