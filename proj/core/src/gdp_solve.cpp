#include "gdpkit/gdp_solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gdpkit/detail/tree_search.hpp"
#include "gdpkit/error.hpp"

namespace gdpkit {

namespace {

constexpr double kSeparationTol = 1e-7;
constexpr double kCoefficientFloor = 1e-10;

// lo <= sum(coeff * y) <= hi with coeff in {+1, -1}.
struct BoolRow {
  std::vector<std::pair<std::size_t, int>> terms;
  double lo = -kInf;
  double hi = kInf;
};

void add_relation(BoolRow& row, Relation relation, double rhs) {
  if (relation != Relation::kLessEqual) row.lo = rhs;
  if (relation != Relation::kGreaterEqual) row.hi = rhs;
}

std::vector<BoolRow> logic_rows(const GdpModel& model) {
  std::vector<BoolRow> rows;
  for (const auto& labeled : model.propositions()) {
    for (const auto& clause : to_cnf(labeled.prop).clauses) {
      BoolRow row;
      double negatives = 0.0;
      for (const auto& lit : clause) {
        row.terms.emplace_back(lit.indicator.value, lit.negated ? -1 : 1);
        if (lit.negated) negatives += 1.0;
      }
      row.lo = 1.0 - negatives;
      rows.push_back(std::move(row));
    }
  }
  for (const auto& labeled : model.cardinalities()) {
    const Cardinality& card = labeled.card;
    BoolRow row;
    for (IndicatorId id : card.indicators) row.terms.emplace_back(id.value, 1);
    double rhs = 0.0;
    if (const int* n = std::get_if<int>(&card.count)) {
      rhs = *n;
    } else {
      row.terms.emplace_back(std::get<IndicatorId>(card.count).value, -1);
    }
    add_relation(row,
                 card.mode == CardinalityMode::kExactly   ? Relation::kEqual
                 : card.mode == CardinalityMode::kAtLeast ? Relation::kGreaterEqual
                                                          : Relation::kLessEqual,
                 rhs);
    rows.push_back(std::move(row));
  }
  const auto& all = model.disjunctions();
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (!all[k].auto_select || covering_selection(model, k)) continue;
    BoolRow row;
    for (IndicatorId id : model.indicators_of(k)) row.terms.emplace_back(id.value, 1);
    double rhs = 1.0;
    if (all[k].parent) {
      const auto& parent = all[all[k].parent->disjunction].disjuncts[all[k].parent->disjunct];
      row.terms.emplace_back(parent.indicator.value, -1);
      rhs = 0.0;
    }
    add_relation(row, Relation::kEqual, rhs);
    rows.push_back(std::move(row));
  }
  return rows;
}

// Assignment values: -1 unknown, 0 false, 1 true.
bool propagate(const std::vector<BoolRow>& rows, std::vector<int>& value) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& row : rows) {
      double min_act = 0.0;
      double max_act = 0.0;
      for (auto [i, c] : row.terms) {
        if (value[i] >= 0) {
          min_act += c * value[i];
          max_act += c * value[i];
        } else {
          (c > 0 ? max_act : min_act) += c;
        }
      }
      if (max_act < row.lo - 0.5 || min_act > row.hi + 0.5) return false;
      for (auto [i, c] : row.terms) {
        if (value[i] >= 0) continue;
        // Span of this term is |c| = 1.
        if (max_act - 1.0 < row.lo - 0.5) {
          value[i] = c > 0 ? 1 : 0;
          changed = true;
        } else if (min_act + 1.0 > row.hi + 0.5) {
          value[i] = c > 0 ? 0 : 1;
          changed = true;
        } else {
          continue;
        }
        break;
      }
    }
  }
  return true;
}

// Deleted disjuncts take everything nested under them along.
void apply_fixings(const GdpModel& model,
                   const std::map<IndicatorId, bool>& fixed,
                   std::vector<int>& value) {
  for (const auto& [id, v] : fixed) value[id.value] = v ? 1 : 0;
  const auto& all = model.disjunctions();
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& disjunction : all) {
      for (const auto& d : disjunction.disjuncts) {
        if (value[d.indicator.value] != 0) continue;
        for (std::size_t inner : d.nested) {
          for (IndicatorId id : model.indicators_of(inner)) {
            if (value[id.value] != 0) {
              value[id.value] = 0;
              changed = true;
            }
          }
        }
      }
    }
  }
}

void require_linear(const GdpModel& model) {
  auto check = [](const Constraint& con) {
    if (linearity_of(con.body) != Linearity::kAffine) {
      throw Error(Errc::kNonlinear,
                  "constraint '" + con.label + "' is nonlinear; the embedded "
                  "solver is linear only");
    }
  };
  for (const auto& con : model.constraints()) check(con);
  for (const auto& disjunction : model.disjunctions()) {
    for (const auto& d : disjunction.disjuncts) {
      for (const auto& con : d.constraints) check(con);
    }
  }
}

std::string describe_fixed(const GdpModel& model,
                           const std::map<IndicatorId, bool>& fixed) {
  std::string out;
  for (const auto& [id, v] : fixed) {
    if (!out.empty()) out += ',';
    out += model.indicator(id).name + (v ? "=1" : "=0");
  }
  return out;
}

std::size_t prefix_size(const GdpModel& model) {
  return model.variables().size() + model.indicators().size();
}

}  // namespace

bool logic_consistent(const GdpModel& model,
                      const std::map<IndicatorId, bool>& fixed) {
  std::vector<int> value(model.indicators().size(), -1);
  apply_fixings(model, fixed, value);
  for (const auto& [id, v] : fixed) {
    if (value[id.value] != (v ? 1 : 0)) return false;
  }
  return propagate(logic_rows(model), value);
}

MipSolution solve_disjunctive_bb(const GdpModel& model,
                                 const DbbOptions& options) {
  require_linear(model);
  const double sign = model.objective().sense == Sense::kMaximize ? -1.0 : 1.0;
  const std::size_t prefix = prefix_size(model);
  const auto rows = logic_rows(model);

  auto evaluate = [&](const DbbNode& node) {
    detail::NodeOutcome<DbbNode> outcome;
    outcome.bound = std::numeric_limits<double>::infinity();

    std::vector<int> value(model.indicators().size(), -1);
    apply_fixings(model, node.fixed, value);
    if (!propagate(rows, value)) return outcome;

    ReformulateOptions ropts;
    ropts.method = options.method;
    ropts.big_m = options.big_m;
    ropts.epsilon = options.epsilon;
    ropts.fixed = node.fixed;
    Reformulation ref = reformulate(model, ropts);
    for (const auto& row : options.extra_rows) {
      ref.milp.add_row(row.name, row.expr, row.relation, row.rhs, row.provenance);
    }

    const LpSolution lp = solve_lp(ref.milp);
    outcome.lp_iterations = lp.iterations;
    if (lp.status == SolveStatus::kInfeasible) return outcome;
    if (lp.status == SolveStatus::kUnbounded) {
      outcome.kind = decltype(outcome)::Kind::kUnbounded;
      outcome.bound = -std::numeric_limits<double>::infinity();
      return outcome;
    }
    if (lp.status != SolveStatus::kOptimal) {
      throw Error(Errc::kInvalidArgument, "LP iteration limit reached");
    }
    outcome.bound = sign * lp.objective;

    // Unfixed indicator closest to 1; declaration order breaks ties.
    std::optional<IndicatorId> branch;
    double best = -1.0;
    for (const auto& [id, var] : ref.binaries) {
      if (node.fixed.count(id)) continue;
      const double y = lp.point[var.value];
      if (std::abs(y - std::round(y)) <= options.integrality_tol) continue;
      if (y > best + 1e-12) {
        best = y;
        branch = id;
      }
    }

    if (!branch) {
      bool integral = true;
      for (std::size_t j = 0; j < ref.milp.variables.size(); ++j) {
        if (!ref.milp.variables[j].binary) continue;
        const double x = lp.point[j];
        if (std::abs(x - std::round(x)) > options.integrality_tol) integral = false;
      }
      std::vector<double> point = lp.point;
      if (!integral) {
        // Indicators settled but plain binaries are not: finish the node
        // with ordinary branch and bound.
        MipOptions mopts;
        mopts.gap_rel = options.gap_rel;
        mopts.integrality_tol = options.integrality_tol;
        const MipSolution sub = solve_mip(ref.milp, mopts);
        outcome.lp_iterations += sub.lp_iterations;
        if (sub.status == SolveStatus::kInfeasible) {
          outcome.bound = std::numeric_limits<double>::infinity();
          return outcome;
        }
        if (sub.status == SolveStatus::kUnbounded) {
          outcome.kind = decltype(outcome)::Kind::kUnbounded;
          outcome.bound = -std::numeric_limits<double>::infinity();
          return outcome;
        }
        outcome.bound = sign * sub.objective;
        point = sub.point;
      }
      outcome.kind = decltype(outcome)::Kind::kFeasible;
      point.resize(prefix);
      for (std::size_t j = 0; j < prefix; ++j) {
        if (ref.milp.variables[j].binary) point[j] = std::round(point[j]);
      }
      outcome.point = std::move(point);
      return outcome;
    }

    outcome.kind = decltype(outcome)::Kind::kBranched;
    outcome.branch_note = model.indicator(*branch).name;
    for (bool v : {true, false}) {
      DbbNode child = node;
      child.fixed[*branch] = v;
      child.depth = node.depth + 1;
      child.bound = outcome.bound;
      outcome.children.push_back(std::move(child));
    }
    return outcome;
  };

  detail::SearchSettings settings;
  settings.workers = options.workers;
  settings.gap_rel = options.gap_rel;
  settings.node_limit = options.node_limit;
  settings.report_sign = sign;
  return detail::best_first_search(
      DbbNode{}, evaluate,
      [&](const DbbNode& n) { return describe_fixed(model, n.fixed); },
      settings);
}

std::optional<Cut> generate_hull_cut(std::span<const double> point,
                                     const GdpModel& model, double epsilon) {
  const std::size_t prefix = prefix_size(model);
  if (point.size() < prefix) {
    throw Error(Errc::kInvalidArgument,
                "point must cover the model variables and indicator binaries");
  }
  const Reformulation hull = reformulate_hull(model, epsilon);

  // min t s.t. |v_j - p_j| <= t over the projected variables.
  MilpModel sep = hull.milp;
  sep.sense = Sense::kMinimize;
  sep.objective = AffineExpr{};
  const VarId t = sep.add_variable("sep_t", 0.0, kInf);
  sep.objective.add_term(t, 1.0);
  std::vector<std::size_t> hi_rows(prefix);
  std::vector<std::size_t> lo_rows(prefix);
  for (std::size_t j = 0; j < prefix; ++j) {
    AffineExpr up = AffineExpr::term(VarId{static_cast<std::uint32_t>(j)});
    up.add_term(t, -1.0);
    hi_rows[j] = sep.rows.size();
    sep.add_row("sep_hi_" + std::to_string(j), up, Relation::kLessEqual,
                point[j], Provenance{RowOrigin::kCut, {}});
    AffineExpr down = AffineExpr::term(VarId{static_cast<std::uint32_t>(j)});
    down.add_term(t, 1.0);
    lo_rows[j] = sep.rows.size();
    sep.add_row("sep_lo_" + std::to_string(j), down, Relation::kGreaterEqual,
                point[j], Provenance{RowOrigin::kCut, {}});
  }
  const LpSolution dist = solve_lp(sep);
  if (dist.status != SolveStatus::kOptimal) return std::nullopt;
  if (dist.objective <= kSeparationTol) return std::nullopt;

  // The rhs duals form a subgradient of the distance at the point.
  std::vector<double> xi(prefix);
  double scale = 0.0;
  for (std::size_t j = 0; j < prefix; ++j) {
    xi[j] = dist.row_duals[hi_rows[j]] + dist.row_duals[lo_rows[j]];
    scale = std::max(scale, std::abs(xi[j]));
  }
  if (scale <= kCoefficientFloor) return std::nullopt;
  Cut cut;
  for (std::size_t j = 0; j < prefix; ++j) {
    const double c = xi[j] / scale;
    if (std::abs(c) < kCoefficientFloor) continue;
    cut.expr.add_term(VarId{static_cast<std::uint32_t>(j)}, c);
  }

  // Support value of the hull relaxation along the normal.
  MilpModel support = hull.milp;
  support.sense = Sense::kMaximize;
  support.objective = cut.expr;
  const LpSolution top = solve_lp(support);
  if (top.status != SolveStatus::kOptimal) return std::nullopt;
  cut.rhs = top.objective;
  if (evaluate(cut.expr, point.first(prefix)) - cut.rhs < kSeparationTol) {
    return std::nullopt;
  }
  cut.source.assign(point.begin(), point.begin() + static_cast<std::ptrdiff_t>(prefix));
  cut.distance = dist.objective;
  return cut;
}

HybridResult solve_hybrid_cuts(const GdpModel& model,
                               const HybridOptions& options) {
  HybridResult result;
  Reformulation bigm = reformulate_bigm(model, options.big_m);
  const std::size_t prefix = prefix_size(model);

  LpSolution lp = solve_lp(bigm.milp);
  if (lp.status == SolveStatus::kOptimal) result.root_bounds.push_back(lp.objective);
  while (result.cuts.size() < options.max_cuts &&
         lp.status == SolveStatus::kOptimal) {
    auto cut = generate_hull_cut(std::span<const double>(lp.point).first(prefix),
                                 model, options.epsilon);
    if (!cut) break;
    bigm.milp.add_row("cut_" + std::to_string(result.cuts.size() + 1), cut->expr,
                      Relation::kLessEqual, cut->rhs,
                      Provenance{RowOrigin::kCut, {}});
    result.cuts.push_back(std::move(*cut));
    lp = solve_lp(bigm.milp);
    if (lp.status == SolveStatus::kOptimal) result.root_bounds.push_back(lp.objective);
  }

  if (options.then == FinishWith::kMip) {
    MipOptions mopts;
    mopts.workers = options.workers;
    mopts.gap_rel = options.gap_rel;
    result.solution = solve_mip(bigm.milp, mopts);
    if (result.solution.point.size() > prefix) result.solution.point.resize(prefix);
  } else {
    DbbOptions dopts;
    dopts.method = Method::kBigM;
    dopts.big_m = options.big_m;
    dopts.epsilon = options.epsilon;
    dopts.workers = options.workers;
    dopts.gap_rel = options.gap_rel;
    for (const auto& row : bigm.milp.rows) {
      if (row.provenance.origin == RowOrigin::kCut) dopts.extra_rows.push_back(row);
    }
    result.solution = solve_disjunctive_bb(model, dopts);
  }
  return result;
}

}  // namespace gdpkit
