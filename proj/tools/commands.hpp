#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "gdpkit/reformulate.hpp"

namespace gdpkit::tools {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInvalid = 2,
  kExitInfeasible = 3,
  kExitUnbounded = 4,
};

struct ReformulateArgs {
  std::string method = "bigm";
  /// "auto", a number, or a comma list of number / disjunction:NAME=v /
  /// disjunct:IND=v / constraint:LABEL=v entries.
  std::string m = "auto";
  double epsilon = kDefaultEpsilon;
  std::optional<std::filesystem::path> out;
};

struct SolveArgs {
  std::string method = "bigm";
  std::string m = "auto";
  double epsilon = kDefaultEpsilon;
  std::string algo = "mip";
  std::string finish = "mip";
  std::size_t max_cuts = 5;
  int workers = 1;
  std::optional<std::filesystem::path> log;
  bool timing = false;
};

struct CompareArgs {
  std::string m = "auto";
  double epsilon = kDefaultEpsilon;
};

/// Throws Error(kInvalidArgument) on malformed text.
MSpec parse_m_spec(const std::string& text);

int cmd_check(const std::filesystem::path& path, std::ostream& out,
              std::ostream& err);
int cmd_reformulate(const std::filesystem::path& path, const ReformulateArgs& args,
                    std::ostream& out, std::ostream& err);
int cmd_solve(const std::filesystem::path& path, const SolveArgs& args,
              std::ostream& out, std::ostream& err);
int cmd_compare(const std::filesystem::path& path, const CompareArgs& args,
                std::ostream& out, std::ostream& err);

}  // namespace gdpkit::tools
