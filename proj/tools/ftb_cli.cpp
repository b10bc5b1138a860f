// Command-line front end: ftb <bounds|price|hedge-box|counterexample|arbitrage|gen>.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "ftb/cli/commands.hpp"

namespace {

using ftb::cli::Json;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("ftb");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("FTB_LOG")) {
    auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("FTB_LOG='{}' not recognized; expected error, warn, info or debug", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ftb::InputError("cannot open config file: " + path);
  try {
    Json j = Json::parse(in);
    if (!j.is_object()) throw ftb::InputError("config file must hold a JSON object");
    return j;
  } catch (const Json::exception& e) {
    throw ftb::InputError(path + ": " + e.what());
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ftb::InputError("cannot write " + out_path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Bounds on joint distribution functionals under marginal and dependence uncertainty"};
  app.require_subcommand(1);
  app.fallthrough();

  ftb::cli::CommandOptions opt;
  std::string format = "json";
  std::string out_path;
  std::string config_path;
  bool timing = false;

  auto* o_exact = app.add_flag("--exact", opt.exact, "Exact rational arithmetic");
  auto* o_tol = app.add_option("--tol", opt.tol, "Float-mode tolerance")->check(CLI::PositiveNumber);
  auto* o_format = app.add_option("--format", format, "Output format")
                       ->check(CLI::IsMember({"json", "csv"}));
  auto* o_out = app.add_option("--out", out_path, "Write output to this file");
  app.add_option("--config", config_path, "JSON file with default option values");
  auto* o_timing = app.add_flag("--timing", timing, "Report wall-clock time");

  std::string instance_path;
  std::string class_name;
  auto* o_class = static_cast<CLI::Option*>(nullptr);
  auto* o_side = static_cast<CLI::Option*>(nullptr);

  auto add_instance = [&](CLI::App* sub) {
    sub->add_option("--instance", instance_path, "Instance JSON file")->required();
  };

  auto* bounds = app.add_subcommand("bounds", "Classical, improved and sharp bounds at points");
  add_instance(bounds);
  bounds->add_option("--point", opt.points, "Point x1,...,xd (repeatable)")->required();
  auto* b_class = bounds->add_option("--class", class_name, "Restrict sharp bounds to a class");

  auto* price = app.add_subcommand("price", "Optimal transport value and superhedge");
  add_instance(price);
  o_class = price->add_option("--class", class_name, "exact|order0|order1|Q|Q0|Q1");
  o_side = price->add_option("--side", opt.side, "primal|dual|both");
  auto* p_corner = price->add_option("--corner", "Indicator payoff of (-inf, corner]");

  auto* hedge = app.add_subcommand("hedge-box", "Closed-form value and hedge of a box indicator");
  add_instance(hedge);
  auto* h_corner = hedge->add_option("--corner", "Box corner B1,...,Bd");
  hedge->add_flag("--value-only", opt.value_only, "Value only (any dimension)");

  auto* counter = app.add_subcommand("counterexample", "Separation of the improved bound from the exact class maximum");

  auto* arb = app.add_subcommand("arbitrage", "Uniform strong arbitrage check");
  add_instance(arb);

  ftb::cli::GenOptions gen_opt;
  auto* gen = app.add_subcommand("gen", "Write a random feasible instance");
  gen->add_option("--seed", gen_opt.seed, "Random seed");
  gen->add_option("--dim", gen_opt.dim, "Dimension");
  gen->add_option("--grid", gen_opt.grid, "Points per axis (at most 12)");
  gen->add_option("--nconstraints", gen_opt.nconstraints, "Number of equality constraints");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ftb::cli::kInputError;
  }

  std::string command = app.get_subcommands().front()->get_name();
  for (int k = 1; k < argc; ++k) opt.args.emplace_back(argv[k]);

  try {
    if (!config_path.empty()) {
      Json cfg = load_config(config_path);
      auto unset = [](CLI::Option* o) { return o == nullptr || o->count() == 0; };
      for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        const std::string& k = it.key();
        if (k == "exact" && unset(o_exact)) opt.exact = it->get<bool>();
        else if (k == "tol" && unset(o_tol)) opt.tol = it->get<double>();
        else if (k == "format" && unset(o_format)) format = it->get<std::string>();
        else if (k == "out" && unset(o_out)) out_path = it->get<std::string>();
        else if (k == "timing" && unset(o_timing)) timing = it->get<bool>();
        else if (k == "class" && unset(command == "bounds" ? b_class : o_class)) class_name = it->get<std::string>();
        else if (k == "side" && unset(o_side)) opt.side = it->get<std::string>();
        else if (k != "exact" && k != "tol" && k != "format" && k != "out" && k != "timing" &&
                 k != "class" && k != "side")
          throw ftb::InputError("config: unknown key \"" + k + "\"");
      }
      if (format != "json" && format != "csv") throw ftb::InputError("config: format must be json or csv");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ftb::cli::kInputError;
  }
  if (!class_name.empty()) opt.class_name = class_name;
  if (p_corner->count()) opt.corner = p_corner->as<std::string>();
  if (h_corner->count()) opt.corner = h_corner->as<std::string>();

  if (command == "gen") {
    try {
      auto inst = ftb::cli::generate_instance(gen_opt);
      emit(ftb::cli::instance_to_json(inst).dump(2) + "\n", out_path);
      return ftb::cli::kSuccess;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return ftb::cli::kInputError;
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  ftb::cli::RunReport report;
  try {
    report = ftb::cli::run_command(command, opt, [&]() -> ftb::cli::RunReport {
      if (command == "counterexample") return ftb::cli::cmd_counterexample(opt);
      auto inst = ftb::cli::load_instance(instance_path);
      spdlog::info("loaded {} (dimension {})", instance_path, inst.dimension);
      if (command == "bounds") return ftb::cli::cmd_bounds(inst, opt);
      if (command == "price") return ftb::cli::cmd_price(inst, opt);
      if (command == "hedge-box") return ftb::cli::cmd_hedge_box(inst, opt);
      return ftb::cli::cmd_arbitrage(inst, opt);
    });
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return ftb::cli::kInternalError;
  }
  if (timing) {
    report.timing_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  if (report.exit_code != ftb::cli::kSuccess) std::cerr << "error: " << report.message << "\n";

  try {
    emit(format == "csv" ? ftb::cli::report_to_csv(report)
                         : ftb::cli::report_to_json(report).dump(2) + "\n",
         out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ftb::cli::kInputError;
  }
  (void)counter;
  return report.exit_code;
}
