#pragma once

// Machine-readable command output. All numbers are stored as text produced by
// format_scalar, so the JSON form round-trips without loss in either mode.

#include "json.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ftb/boxhedge.hpp"
#include "ftb/constructions.hpp"
#include "ftb/measures.hpp"
#include "ftb/transport.hpp"

namespace ftb::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kSuccess = 0,
  kInternalError = 1,
  kInputError = 2,
  kDimensionError = 3,
  kClassEmpty = 4,
};

struct ResultRow {
  std::string label;
  std::vector<std::pair<std::string, std::string>> values;

  ResultRow& add(std::string key, std::string value) {
    values.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  const std::string* find(const std::string& key) const;
  bool operator==(const ResultRow&) const = default;
};

struct RunReport {
  std::string command;
  std::vector<std::string> args;
  std::string mode;  // "exact" or "float"
  std::string status = "ok";
  int exit_code = kSuccess;
  std::string message;
  std::vector<ResultRow> results;
  Json certificates = Json::object();
  std::optional<double> timing_ms;

  bool operator==(const RunReport&) const = default;
};

Json report_to_json(const RunReport& r);
RunReport report_from_json(const Json& j);
std::string report_to_csv(const RunReport& r);

std::string join_point(const std::vector<std::string>& coords);

template <class T>
std::string join_point(const std::vector<T>& x) {
  std::vector<std::string> s;
  for (const auto& v : x) s.push_back(format_scalar(v));
  return join_point(s);
}

template <class T>
Json scalars_json(const std::vector<T>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(format_scalar(x));
  return out;
}

/// Nonzero atoms of a measure with the grid axes.
template <class T>
Json measure_json(const JointMeasure<T>& mu) {
  Json axes = Json::array();
  for (const auto& a : mu.grid().axes()) axes.push_back(scalars_json(a));
  Json atoms = Json::array();
  for (std::size_t k = 0; k < mu.grid().size(); ++k) {
    if (mu.masses()[k] == T(0)) continue;
    atoms.push_back(Json{{"point", scalars_json(mu.grid().point(k))},
                         {"mass", format_scalar(mu.masses()[k])}});
  }
  return Json{{"axes", axes}, {"atoms", atoms}, {"total_mass", format_scalar(mu.total_mass())}};
}

template <class T>
Json hedge_json(const HedgePortfolio<T>& h) {
  Json axes = Json::array();
  for (const auto& a : h.axes) axes.push_back(scalars_json(a));
  Json f = Json::array();
  for (const auto& fj : h.f) f.push_back(scalars_json(fj));
  Json out{{"variant", to_string(h.variant)}, {"axes", axes}, {"f", f}};
  if (!h.g.empty()) {
    Json g = Json::array();
    for (const auto& gj : h.g) g.push_back(scalars_json(gj));
    out["g"] = g;
  }
  out["a"] = scalars_json(h.a);
  out["price"] = format_scalar(h.price);
  return out;
}

template <class T>
Json violations_json(const MembershipReport<T>& rep) {
  Json out = Json::array();
  for (const auto& v : rep.violations) {
    Json e{{"kind", to_string(v.kind)}, {"index", v.index}};
    if (v.point) e["point"] = format_scalar(*v.point);
    e["magnitude"] = format_scalar(v.magnitude);
    out.push_back(e);
  }
  return out;
}

}  // namespace ftb::cli
