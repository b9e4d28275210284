#include "gdpkit/milp_model.hpp"

#include <algorithm>
#include <cmath>

namespace gdpkit {

const char* to_string(RowOrigin origin) {
  switch (origin) {
    case RowOrigin::kGlobal: return "global";
    case RowOrigin::kDisjunct: return "disjunct";
    case RowOrigin::kLogic: return "logic";
    case RowOrigin::kSelection: return "selection";
    case RowOrigin::kLinkage: return "linkage";
    case RowOrigin::kHullBound: return "hull-bound";
    case RowOrigin::kHullAggregation: return "hull-aggregation";
    case RowOrigin::kCut: return "cut";
  }
  return "?";
}

VarId MilpModel::add_variable(std::string name, double lower, double upper,
                              bool binary) {
  const VarId id{static_cast<std::uint32_t>(variables.size())};
  variables.push_back(MilpVariable{std::move(name), lower, upper, binary});
  return id;
}

void MilpModel::add_row(std::string name, AffineExpr expr, Relation relation,
                        double rhs, Provenance provenance) {
  rhs -= expr.constant();
  expr.add_constant(-expr.constant());
  rows.push_back(LinearRow{std::move(name), std::move(expr), relation, rhs,
                           std::move(provenance)});
}

std::size_t MilpModel::num_binaries() const {
  return static_cast<std::size_t>(
      std::count_if(variables.begin(), variables.end(),
                    [](const MilpVariable& v) { return v.binary; }));
}

std::map<RowOrigin, std::size_t> MilpModel::row_counts() const {
  std::map<RowOrigin, std::size_t> out;
  for (const auto& row : rows) ++out[row.provenance.origin];
  for (const auto& row : nonlinear_rows) ++out[row.provenance.origin];
  return out;
}

double max_violation(const MilpModel& model, std::span<const double> point) {
  double worst = 0.0;
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    const auto& var = model.variables[j];
    worst = std::max({worst, var.lower - point[j], point[j] - var.upper});
  }
  for (const auto& row : model.rows) {
    const double lhs = evaluate(row.expr, point);
    switch (row.relation) {
      case Relation::kLessEqual: worst = std::max(worst, lhs - row.rhs); break;
      case Relation::kGreaterEqual: worst = std::max(worst, row.rhs - lhs); break;
      case Relation::kEqual: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  return worst;
}

}  // namespace gdpkit
