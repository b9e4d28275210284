#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gdpkit/milp.hpp"
#include "gdpkit/model.hpp"
#include "gdpkit/reformulate.hpp"

namespace gdpkit {

/// Disjunctive branch and bound. Points in the result cover the GDP
/// variables followed by one binary per indicator (the common prefix of the
/// Big-M and Hull layouts).
struct DbbOptions {
  Method method = Method::kBigM;
  MSpec big_m;
  double epsilon = kDefaultEpsilon;
  int workers = 1;
  double gap_rel = 1e-6;
  double integrality_tol = 1e-6;
  std::size_t node_limit = 1'000'000;
  /// Appended to every node model; may reference only the GDP variables and
  /// the indicator binaries.
  std::vector<LinearRow> extra_rows;
};

/// Partial indicator assignment of a search node.
struct DbbNode {
  std::map<IndicatorId, bool> fixed;
  double bound = 0.0;
  std::size_t depth = 0;
};

/// Unit propagation over propositions, cardinalities, selection and nesting
/// structure. Returns false when `fixed` already contradicts the logic.
/// Deleted disjuncts imply their nested indicators are false.
bool logic_consistent(const GdpModel& model,
                      const std::map<IndicatorId, bool>& fixed);

/// Branches on the unfixed indicator whose relaxed binary is closest to 1;
/// the true child enforces the disjunct, the false child deletes it and the
/// node is re-reformulated. Throws Errc::kNonlinear for nonlinear models.
MipSolution solve_disjunctive_bb(const GdpModel& model,
                                 const DbbOptions& options = {});

/// expr <= rhs over the GDP variables and indicator binaries.
struct Cut {
  AffineExpr expr;
  double rhs = 0.0;
  std::vector<double> source;
  /// L-infinity distance from `source` to the hull relaxation.
  double distance = 0.0;
};

/// Separates `point` (GDP variables then indicator binaries) from the hull
/// relaxation. Returns nothing when the point is within 1e-7 of it.
std::optional<Cut> generate_hull_cut(std::span<const double> point,
                                     const GdpModel& model,
                                     double epsilon = kDefaultEpsilon);

enum class FinishWith { kMip, kDisjunctive };

struct HybridOptions {
  std::size_t max_cuts = 5;
  FinishWith then = FinishWith::kMip;
  MSpec big_m;
  double epsilon = kDefaultEpsilon;
  int workers = 1;
  double gap_rel = 1e-6;
};

struct HybridResult {
  MipSolution solution;
  std::vector<Cut> cuts;
  /// Big-M root LP objective before any cut, then after each cut.
  std::vector<double> root_bounds;
};

HybridResult solve_hybrid_cuts(const GdpModel& model,
                               const HybridOptions& options = {});

}  // namespace gdpkit
