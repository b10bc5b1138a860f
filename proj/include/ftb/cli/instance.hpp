#pragma once

// JSON instance files. Numbers are kept as decimal text until the numeric mode
// is known, so exact mode sees 0.05 as 1/20 rather than a binary double.

#include "json.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ftb/bounds.hpp"
#include "ftb/error.hpp"
#include "ftb/measures.hpp"
#include "ftb/transport.hpp"

namespace ftb::cli {

using Json = nlohmann::ordered_json;

using RawAtoms = std::vector<std::pair<std::string, std::string>>;

struct RawConstraint {
  std::vector<std::string> corner;
  std::string pi_lower;
  std::string pi_upper;
};

struct RawEnvelope {
  RawAtoms cdf_floor;
  RawAtoms cdf_ceiling;
};

struct RawPayoff {
  std::string kind;  // "indicator" or "grid"
  std::vector<std::string> corner;
  std::vector<std::string> values;  // row-major, last axis fastest
};

struct InstanceFile {
  std::size_t dimension = 0;
  std::vector<RawAtoms> marginals;
  std::vector<RawConstraint> constraints;
  std::optional<std::vector<RawEnvelope>> envelopes;
  std::optional<RawPayoff> payoff;
};

/// Structural parse; numeric validation happens in `materialize`.
InstanceFile instance_from_json(const Json& j);
Json instance_to_json(const InstanceFile& inst);
InstanceFile load_instance(const std::string& path);

/// Parses a comma-separated point such as "0,1.5".
std::vector<std::string> split_point(const std::string& text);

template <class T>
struct Instance {
  Marginals<T> marginals;
  ConstraintSet<T> constraints;
  std::optional<std::vector<MarginalBand<T>>> bands;
  std::optional<RawPayoff> payoff;

  std::size_t dimension() const { return marginals.size(); }
};

template <class T>
std::vector<T> parse_point(const std::vector<std::string>& coords, std::size_t dimension) {
  if (coords.size() != dimension)
    throw DimensionError("point has " + std::to_string(coords.size()) +
                         " coordinates, instance dimension is " + std::to_string(dimension));
  std::vector<T> out;
  out.reserve(coords.size());
  for (const auto& c : coords) out.push_back(parse_scalar<T>(c));
  return out;
}

template <class T>
DiscreteMarginal<T> parse_atoms(const RawAtoms& raw, bool require_probability, const T& tol) {
  std::vector<Atom<T>> atoms;
  atoms.reserve(raw.size());
  for (const auto& [p, m] : raw) atoms.push_back({parse_scalar<T>(p), parse_scalar<T>(m)});
  return DiscreteMarginal<T>(std::move(atoms), require_probability, tol);
}

/// Converts to the numeric mode and checks every type invariant.
template <class T>
Instance<T> materialize(const InstanceFile& file, const T& tol = default_tolerance<T>()) {
  Instance<T> inst;
  for (const auto& m : file.marginals) inst.marginals.push_back(parse_atoms<T>(m, false, tol));
  for (const auto& c : file.constraints) {
    inst.constraints.emplace_back(parse_point<T>(c.corner, file.dimension),
                                  parse_scalar<T>(c.pi_lower), parse_scalar<T>(c.pi_upper));
  }
  if (file.envelopes) {
    if (file.envelopes->size() != file.dimension)
      throw DimensionError("one envelope pair per axis is required");
    std::vector<MarginalBand<T>> bands;
    for (const auto& e : *file.envelopes)
      bands.push_back({parse_atoms<T>(e.cdf_floor, true, tol), parse_atoms<T>(e.cdf_ceiling, true, tol)});
    inst.bands = std::move(bands);
  }
  inst.payoff = file.payoff;
  return inst;
}

/// Payoff on `grid` from the instance description.
template <class T>
PayoffGrid<T> make_payoff(const RawPayoff& raw, const ProductGrid<T>& grid) {
  if (raw.kind == "indicator") return PayoffGrid<T>::indicator(grid, parse_point<T>(raw.corner, grid.dimension()));
  if (raw.values.size() != grid.size())
    throw InputError("grid payoff has " + std::to_string(raw.values.size()) +
                     " values, the support grid has " + std::to_string(grid.size()));
  std::vector<T> values;
  values.reserve(raw.values.size());
  for (const auto& v : raw.values) values.push_back(parse_scalar<T>(v));
  return PayoffGrid<T>::sampled(grid, std::move(values));
}

}  // namespace ftb::cli
