#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "gdpkit/expr.hpp"
#include "gdpkit/model.hpp"

namespace gdpkit {

enum class RowOrigin {
  kGlobal,
  kDisjunct,
  kLogic,
  kSelection,
  kLinkage,
  kHullBound,
  kHullAggregation,
  kCut,
};

const char* to_string(RowOrigin origin);

/// Where a row came from. `path` lists the enclosing disjuncts, outermost
/// first; it is empty for global, logic, selection and cut rows.
struct Provenance {
  RowOrigin origin = RowOrigin::kGlobal;
  std::vector<DisjunctRef> path;

  bool operator==(const Provenance&) const = default;
};

struct MilpVariable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  bool binary = false;

  bool operator==(const MilpVariable&) const = default;
};

/// expr relation rhs with expr.constant() == 0.
struct LinearRow {
  std::string name;
  AffineExpr expr;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
  Provenance provenance;

  bool operator==(const LinearRow&) const = default;
};

/// Row the embedded solver cannot handle (epsilon-perspective output or
/// Big-M-relaxed nonlinear constraints).
struct NonlinearRow {
  std::string name;
  NlExpr expr;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
  Provenance provenance;
};

/// Flat mixed-integer model. Variable i has VarId{i}.
struct MilpModel {
  std::vector<MilpVariable> variables;
  std::vector<LinearRow> rows;
  std::vector<NonlinearRow> nonlinear_rows;
  Sense sense = Sense::kMinimize;
  AffineExpr objective;

  VarId add_variable(std::string name, double lower, double upper,
                     bool binary = false);
  /// Moves the expression constant to the right-hand side.
  void add_row(std::string name, AffineExpr expr, Relation relation,
               double rhs, Provenance provenance);

  std::size_t num_binaries() const;
  /// Row count per origin, linear and nonlinear together.
  std::map<RowOrigin, std::size_t> row_counts() const;
};

/// Max absolute violation of rows and bounds at a dense point (linear rows
/// only).
double max_violation(const MilpModel& model, std::span<const double> point);

}  // namespace gdpkit
