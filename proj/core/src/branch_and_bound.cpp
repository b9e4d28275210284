#include <cmath>
#include <limits>
#include <sstream>

#include "gdpkit/detail/tree_search.hpp"
#include "gdpkit/error.hpp"
#include "gdpkit/milp.hpp"

namespace gdpkit {

std::string format_record(const NodeRecord& record) {
  std::ostringstream out;
  out << "node=" << record.id << " fixed={" << record.fixed
      << "} bound=" << record.bound << " action=" << record.action;
  return out.str();
}

namespace {

struct BranchNode {
  std::vector<double> lower;
  std::vector<double> upper;
  std::string fixed;
};

}  // namespace

MipSolution solve_mip(const MilpModel& model, const MipOptions& options) {
  if (!model.nonlinear_rows.empty()) {
    throw Error(Errc::kNonlinear,
                "model has nonlinear rows; the embedded solver is linear only");
  }
  const double sign = model.sense == Sense::kMaximize ? -1.0 : 1.0;

  BranchNode root;
  for (const auto& var : model.variables) {
    root.lower.push_back(var.lower);
    root.upper.push_back(var.upper);
  }

  auto evaluate = [&](const BranchNode& node) {
    detail::NodeOutcome<BranchNode> outcome;
    const LpSolution lp = solve_lp(model, node.lower, node.upper);
    outcome.lp_iterations = lp.iterations;
    if (lp.status == SolveStatus::kInfeasible) {
      outcome.bound = std::numeric_limits<double>::infinity();
      return outcome;
    }
    if (lp.status == SolveStatus::kUnbounded) {
      outcome.kind = decltype(outcome)::Kind::kUnbounded;
      outcome.bound = -std::numeric_limits<double>::infinity();
      return outcome;
    }
    if (lp.status != SolveStatus::kOptimal) {
      throw Error(Errc::kInvalidArgument, "LP iteration limit reached");
    }
    outcome.bound = sign * lp.objective;

    // Most fractional binary, lowest index on ties.
    std::size_t branch = model.variables.size();
    double best = options.integrality_tol;
    for (std::size_t j = 0; j < model.variables.size(); ++j) {
      if (!model.variables[j].binary) continue;
      const double x = lp.point[j];
      const double frac = std::abs(x - std::round(x));
      if (frac > best) {
        best = frac;
        branch = j;
      }
    }
    if (branch == model.variables.size()) {
      outcome.kind = decltype(outcome)::Kind::kFeasible;
      outcome.point = lp.point;
      for (std::size_t j = 0; j < model.variables.size(); ++j) {
        if (model.variables[j].binary) {
          outcome.point[j] = std::round(outcome.point[j]);
        }
      }
      return outcome;
    }
    outcome.kind = decltype(outcome)::Kind::kBranched;
    const std::string& name = model.variables[branch].name;
    outcome.branch_note = name;
    BranchNode down = node;
    down.upper[branch] = 0.0;
    down.fixed += (down.fixed.empty() ? "" : ",") + name + "=0";
    BranchNode up = node;
    up.lower[branch] = 1.0;
    up.fixed += (up.fixed.empty() ? "" : ",") + name + "=1";
    outcome.children.push_back(std::move(down));
    outcome.children.push_back(std::move(up));
    return outcome;
  };

  detail::SearchSettings settings;
  settings.workers = options.workers;
  settings.gap_rel = options.gap_rel;
  settings.node_limit = options.node_limit;
  settings.report_sign = sign;
  return detail::best_first_search(
      std::move(root), evaluate, [](const BranchNode& n) { return n.fixed; },
      settings);
}

}  // namespace gdpkit
