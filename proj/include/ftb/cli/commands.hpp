#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftb/cli/instance.hpp"
#include "ftb/cli/report.hpp"

namespace ftb::cli {

struct CommandOptions {
  bool exact = false;
  double tol = 1e-9;
  std::optional<std::string> class_name;  // exact|order0|order1|Q|Q0|Q1
  std::string side = "both";              // primal|dual|both
  std::vector<std::string> points;        // "x1,...,xd" each
  std::optional<std::string> corner;
  bool value_only = false;                // hedge-box: skip the decomposition
  std::vector<std::string> args;          // echoed into the report
};

struct GenOptions {
  std::uint64_t seed = 0;
  std::size_t dim = 2;
  std::size_t grid = 4;
  std::size_t nconstraints = 2;
};

/// Commands return a report with the exit code filled in. Input problems
/// throw InputError / DimensionError; run_command maps them to reports.
RunReport cmd_bounds(const InstanceFile& inst, const CommandOptions& opt);
RunReport cmd_price(const InstanceFile& inst, const CommandOptions& opt);
RunReport cmd_hedge_box(const InstanceFile& inst, const CommandOptions& opt);
RunReport cmd_counterexample(const CommandOptions& opt);
RunReport cmd_arbitrage(const InstanceFile& inst, const CommandOptions& opt);
RunReport cmd_gen(const GenOptions& opt);

/// A random instance that is feasible by construction: a measure with masses
/// in multiples of 1/1000 on {0,...,grid-1}^dim, its marginals, and equality
/// constraints at random corners. Deterministic in the seed.
InstanceFile generate_instance(const GenOptions& opt);

/// Accepted spellings of the class flag.
ClassKind parse_class(const std::string& name);

/// Runs `body`, turning library exceptions into an error report.
template <class F>
RunReport run_command(const std::string& command, const CommandOptions& opt, F&& body) {
  auto fail = [&](int code, const std::string& status, const std::string& msg) {
    RunReport r;
    r.command = command;
    r.args = opt.args;
    r.mode = opt.exact ? "exact" : "float";
    r.status = status;
    r.exit_code = code;
    r.message = msg;
    return r;
  };
  try {
    return body();
  } catch (const DimensionError& e) {
    return fail(kDimensionError, "error", e.what());
  } catch (const InputError& e) {
    return fail(kInputError, "error", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kInputError, "error", e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(kInputError, "error", e.what());
  }
}

}  // namespace ftb::cli
