#include "ftb/cli/instance.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ftb::cli {
namespace {

// Decimal text of a JSON scalar. Floats use the shortest round-trip form, so
// 0.05 in the file stays "0.05".
std::string scalar_text(const Json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned() || v.is_number_float()) return v.dump();
  throw InputError(where + ": expected a number or a decimal string");
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + ": missing \"" + key + "\"");
  return *it;
}

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) throw InputError(where + ": unknown key \"" + it.key() + "\"");
}

std::vector<std::string> scalar_list(const Json& v, const std::string& where) {
  if (!v.is_array()) throw InputError(where + ": expected an array");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < v.size(); ++k)
    out.push_back(scalar_text(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

RawAtoms atoms_from_json(const Json& v, const std::string& where) {
  if (!v.is_array()) throw InputError(where + ": expected a list of [point, mass] pairs");
  RawAtoms out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::string at = where + "[" + std::to_string(k) + "]";
    if (!v[k].is_array() || v[k].size() != 2) throw InputError(at + ": expected [point, mass]");
    out.emplace_back(scalar_text(v[k][0], at), scalar_text(v[k][1], at));
  }
  return out;
}

Json atoms_to_json(const RawAtoms& atoms) {
  Json out = Json::array();
  for (const auto& [p, m] : atoms) out.push_back(Json::array({p, m}));
  return out;
}

Json strings_to_json(const std::vector<std::string>& v) {
  Json out = Json::array();
  for (const auto& s : v) out.push_back(s);
  return out;
}

}  // namespace

InstanceFile instance_from_json(const Json& j) {
  check_keys(j, {"dimension", "marginals", "constraints", "envelopes", "payoff"}, "instance");
  InstanceFile inst;
  const Json& marg = require(j, "marginals", "instance");
  if (!marg.is_array() || marg.empty()) throw InputError("marginals: expected a nonempty list");
  for (std::size_t k = 0; k < marg.size(); ++k)
    inst.marginals.push_back(atoms_from_json(marg[k], "marginals[" + std::to_string(k) + "]"));
  inst.dimension = inst.marginals.size();
  if (auto it = j.find("dimension"); it != j.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer())
      throw InputError("dimension: expected a positive integer");
    if (it->get<long long>() != static_cast<long long>(inst.dimension))
      throw DimensionError("dimension " + it->dump() + " does not match " +
                           std::to_string(inst.dimension) + " marginals");
  }
  if (auto it = j.find("constraints"); it != j.end()) {
    if (!it->is_array()) throw InputError("constraints: expected a list");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string where = "constraints[" + std::to_string(k) + "]";
      const Json& c = (*it)[k];
      check_keys(c, {"corner", "pi", "pi_lower", "pi_upper"}, where);
      RawConstraint rc;
      rc.corner = scalar_list(require(c, "corner", where), where + ".corner");
      if (rc.corner.size() != inst.dimension)
        throw DimensionError(where + ": corner dimension does not match the marginals");
      if (c.contains("pi")) {
        if (c.contains("pi_lower") || c.contains("pi_upper"))
          throw InputError(where + ": give either pi or pi_lower/pi_upper");
        rc.pi_lower = rc.pi_upper = scalar_text(c["pi"], where + ".pi");
      } else {
        rc.pi_lower = c.contains("pi_lower") ? scalar_text(c["pi_lower"], where) : "0";
        rc.pi_upper = c.contains("pi_upper") ? scalar_text(c["pi_upper"], where) : "1";
      }
      inst.constraints.push_back(std::move(rc));
    }
  }
  if (auto it = j.find("envelopes"); it != j.end()) {
    if (!it->is_array()) throw InputError("envelopes: expected a list");
    std::vector<RawEnvelope> env;
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string where = "envelopes[" + std::to_string(k) + "]";
      check_keys((*it)[k], {"cdf_floor", "cdf_ceiling"}, where);
      env.push_back({atoms_from_json(require((*it)[k], "cdf_floor", where), where + ".cdf_floor"),
                     atoms_from_json(require((*it)[k], "cdf_ceiling", where), where + ".cdf_ceiling")});
    }
    if (env.size() != inst.dimension)
      throw DimensionError("envelopes: one pair per axis is required");
    inst.envelopes = std::move(env);
  }
  if (auto it = j.find("payoff"); it != j.end()) {
    check_keys(*it, {"kind", "corner", "values"}, "payoff");
    RawPayoff p;
    const Json& kind = require(*it, "kind", "payoff");
    if (!kind.is_string()) throw InputError("payoff.kind: expected a string");
    p.kind = kind.get<std::string>();
    if (p.kind == "indicator") {
      p.corner = scalar_list(require(*it, "corner", "payoff"), "payoff.corner");
      if (p.corner.size() != inst.dimension)
        throw DimensionError("payoff.corner: dimension does not match the marginals");
    } else if (p.kind == "grid") {
      p.values = scalar_list(require(*it, "values", "payoff"), "payoff.values");
    } else {
      throw InputError("payoff.kind must be \"indicator\" or \"grid\"");
    }
    inst.payoff = std::move(p);
  }
  return inst;
}

Json instance_to_json(const InstanceFile& inst) {
  Json j;
  j["dimension"] = inst.dimension;
  Json marg = Json::array();
  for (const auto& m : inst.marginals) marg.push_back(atoms_to_json(m));
  j["marginals"] = marg;
  Json cs = Json::array();
  for (const auto& c : inst.constraints) {
    Json e{{"corner", strings_to_json(c.corner)}};
    if (c.pi_lower == c.pi_upper) {
      e["pi"] = c.pi_lower;
    } else {
      e["pi_lower"] = c.pi_lower;
      e["pi_upper"] = c.pi_upper;
    }
    cs.push_back(e);
  }
  j["constraints"] = cs;
  if (inst.envelopes) {
    Json env = Json::array();
    for (const auto& e : *inst.envelopes)
      env.push_back(Json{{"cdf_floor", atoms_to_json(e.cdf_floor)},
                         {"cdf_ceiling", atoms_to_json(e.cdf_ceiling)}});
    j["envelopes"] = env;
  }
  if (inst.payoff) {
    Json p{{"kind", inst.payoff->kind}};
    if (inst.payoff->kind == "indicator") {
      p["corner"] = strings_to_json(inst.payoff->corner);
    } else {
      p["values"] = strings_to_json(inst.payoff->values);
    }
    j["payoff"] = p;
  }
  return j;
}

InstanceFile load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  return instance_from_json(j);
}

std::vector<std::string> split_point(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (out.empty() || (!text.empty() && text.back() == ','))
    throw InputError("malformed point: '" + text + "'");
  return out;
}

}  // namespace ftb::cli
