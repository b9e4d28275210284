#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

// GDPKIT_LOG: trace, debug, info, warn (default), error, off.
void configure_logging() {
  auto logger = spdlog::stderr_color_mt("gdpkit");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("GDPKIT_LOG")) {
    const auto parsed = spdlog::level::from_str(level);
    if (parsed != spdlog::level::off || std::string(level) == "off") {
      spdlog::set_level(parsed);
    } else {
      spdlog::warn("ignoring GDPKIT_LOG='{}'", level);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gdpkit::tools;
  configure_logging();

  CLI::App app{"gdpkit: generalized disjunctive programming toolkit"};
  app.require_subcommand(1);

  std::string file;
  auto* check = app.add_subcommand("check", "parse and validate a model file");
  check->add_option("file", file, "model file")->required();

  ReformulateArgs ref;
  std::string ref_out;
  auto* reform = app.add_subcommand("reformulate", "write the MILP as an LP file");
  reform->add_option("file", file, "model file")->required();
  reform->add_option("--method", ref.method, "bigm or hull")->capture_default_str();
  reform->add_option("--m", ref.m, "auto, a number, or scope:NAME=value list")
      ->capture_default_str();
  reform->add_option("--epsilon", ref.epsilon, "perspective epsilon in (0,1)")
      ->capture_default_str();
  reform->add_option("--out", ref_out, "LP file to write (default: stdout)");

  SolveArgs solve;
  std::string solve_log;
  auto* solve_cmd = app.add_subcommand("solve", "solve and print a report");
  solve_cmd->add_option("file", file, "model file")->required();
  solve_cmd->add_option("--method", solve.method, "bigm or hull")->capture_default_str();
  solve_cmd->add_option("--m", solve.m, "Big-M specification")->capture_default_str();
  solve_cmd->add_option("--epsilon", solve.epsilon, "perspective epsilon")
      ->capture_default_str();
  solve_cmd->add_option("--algo", solve.algo, "mip, dbb or cuts")->capture_default_str();
  solve_cmd->add_option("--finish", solve.finish, "solver after the cut loop: mip or dbb")
      ->capture_default_str();
  solve_cmd->add_option("--max-cuts", solve.max_cuts, "cut rounds for --algo cuts")
      ->capture_default_str();
  solve_cmd->add_option("--workers", solve.workers, "parallel node workers")
      ->capture_default_str();
  solve_cmd->add_option("--log", solve_log, "write the node/cut log here");
  solve_cmd->add_flag("--timing", solve.timing, "print wall time");

  CompareArgs compare;
  auto* compare_cmd =
      app.add_subcommand("compare", "compare Big-M and hull relaxation bounds");
  compare_cmd->add_option("file", file, "model file")->required();
  compare_cmd->add_option("--m", compare.m, "Big-M specification")->capture_default_str();
  compare_cmd->add_option("--epsilon", compare.epsilon, "perspective epsilon")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  if (*check) return cmd_check(file, std::cout, std::cerr);
  if (*reform) {
    if (!ref_out.empty()) ref.out = ref_out;
    return cmd_reformulate(file, ref, std::cout, std::cerr);
  }
  if (*solve_cmd) {
    if (!solve_log.empty()) solve.log = solve_log;
    return cmd_solve(file, solve, std::cout, std::cerr);
  }
  return cmd_compare(file, compare, std::cout, std::cerr);
}
