#include "ftb/cli/report.hpp"

#include <sstream>

#include "ftb/error.hpp"

namespace ftb::cli {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

const std::string* ResultRow::find(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return &v;
  return nullptr;
}

std::string join_point(const std::vector<std::string>& coords) {
  std::string out;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    if (k) out += ',';
    out += coords[k];
  }
  return out;
}

Json report_to_json(const RunReport& r) {
  Json j;
  j["command"] = r.command;
  j["args"] = r.args;
  j["mode"] = r.mode;
  j["status"] = r.status;
  j["exit_code"] = r.exit_code;
  j["message"] = r.message;
  Json rows = Json::array();
  for (const auto& row : r.results) {
    Json values = Json::object();
    for (const auto& [k, v] : row.values) values[k] = v;
    rows.push_back(Json{{"label", row.label}, {"values", values}});
  }
  j["results"] = rows;
  j["certificates"] = r.certificates;
  if (r.timing_ms) j["timing_ms"] = *r.timing_ms;
  return j;
}

RunReport report_from_json(const Json& j) {
  RunReport r;
  r.command = j.at("command").get<std::string>();
  r.args = j.at("args").get<std::vector<std::string>>();
  r.mode = j.at("mode").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.exit_code = j.at("exit_code").get<int>();
  r.message = j.at("message").get<std::string>();
  for (const auto& row : j.at("results")) {
    ResultRow out;
    out.label = row.at("label").get<std::string>();
    for (auto it = row.at("values").begin(); it != row.at("values").end(); ++it)
      out.values.emplace_back(it.key(), it.value().get<std::string>());
    r.results.push_back(std::move(out));
  }
  r.certificates = j.at("certificates");
  if (auto it = j.find("timing_ms"); it != j.end()) r.timing_ms = it->get<double>();
  return r;
}

// One line per result row; the columns are the union of value keys in order
// of first appearance.
std::string report_to_csv(const RunReport& r) {
  std::vector<std::string> keys;
  for (const auto& row : r.results)
    for (const auto& [k, v] : row.values)
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  std::ostringstream out;
  out << "label";
  for (const auto& k : keys) out << ',' << csv_field(k);
  out << '\n';
  for (const auto& row : r.results) {
    out << csv_field(row.label);
    for (const auto& k : keys) {
      const std::string* v = row.find(k);
      out << ',' << (v ? csv_field(*v) : std::string());
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace ftb::cli
