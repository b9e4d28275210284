#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gdpkit/milp_model.hpp"

namespace gdpkit {

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kLimit };

const char* to_string(SolveStatus status);

struct LpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  /// Dense point indexed by VarId::value.
  std::vector<double> point;
  double objective = 0.0;
  std::size_t iterations = 0;
  /// d(objective)/d(rhs) per linear row, in the model's sense.
  std::vector<double> row_duals;
};

struct LpOptions {
  /// 0 picks a limit proportional to the model size.
  std::size_t max_iterations = 0;
};

/// Bounded-variable primal simplex on the LP relaxation (binaries in [0,1]).
/// Throws Errc::kNonlinear when the model has nonlinear rows.
LpSolution solve_lp(const MilpModel& model, const LpOptions& options = {});

/// Same, with per-variable bound overrides (sizes must match the model).
LpSolution solve_lp(const MilpModel& model, std::span<const double> lower,
                    std::span<const double> upper,
                    const LpOptions& options = {});

/// One line of the branch-and-bound log.
struct NodeRecord {
  std::size_t id = 0;
  std::string fixed;
  double bound = 0.0;
  std::string action;
};

std::string format_record(const NodeRecord& record);

/// Incumbent and global bound after a node, in the model's sense.
struct BoundSample {
  double incumbent = 0.0;
  double bound = 0.0;
  bool has_incumbent = false;
};

struct MipSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<double> point;
  double objective = 0.0;
  double best_bound = 0.0;
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  std::vector<NodeRecord> log;
  std::vector<BoundSample> trace;
};

struct MipOptions {
  /// Parallel node evaluation; results are reproducible only with 1.
  int workers = 1;
  double gap_rel = 1e-6;
  double integrality_tol = 1e-6;
  std::size_t node_limit = 1'000'000;
};

inline double gap_tolerance(double gap_rel, double incumbent) {
  return gap_rel * (1.0 + (incumbent < 0 ? -incumbent : incumbent));
}

/// Best-bound branch and bound over the binaries, branching on the most
/// fractional one (lowest index on ties).
MipSolution solve_mip(const MilpModel& model, const MipOptions& options = {});

}  // namespace gdpkit
