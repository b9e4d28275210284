#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gdpkit/expr.hpp"
#include "gdpkit/logic.hpp"

namespace gdpkit {

/// Position of a disjunct: (disjunction index, disjunct index), 0-based.
struct DisjunctRef {
  std::size_t disjunction = 0;
  std::size_t disjunct = 0;

  auto operator<=>(const DisjunctRef&) const = default;
};

struct Disjunct {
  IndicatorId indicator;
  std::vector<Constraint> constraints;
  /// Indices of disjunctions nested inside this disjunct.
  std::vector<std::size_t> nested;

  bool operator==(const Disjunct&) const = default;
};

struct Disjunction {
  std::string name;
  std::vector<Disjunct> disjuncts;
  std::optional<DisjunctRef> parent;
  /// Add exactly(1, ...) (or the parent linkage when nested) unless a
  /// cardinality constraint over exactly these indicators exists.
  bool auto_select = true;

  bool operator==(const Disjunction&) const = default;
};

struct IndicatorDecl {
  IndicatorId id;
  std::string name;
  DisjunctRef owner;

  bool operator==(const IndicatorDecl&) const = default;
};

enum class Sense { kMinimize, kMaximize };

struct Objective {
  Sense sense = Sense::kMinimize;
  Expr expr = AffineExpr{};

  bool operator==(const Objective&) const = default;
};

struct LabeledProposition {
  std::string label;
  Proposition prop;

  bool operator==(const LabeledProposition&) const = default;
};

struct LabeledCardinality {
  std::string label;
  Cardinality card;

  bool operator==(const LabeledCardinality&) const = default;
};

/// Input to add_disjunction. An empty indicator name defaults to
/// `<disjunction>_<k>` with k starting at 1; a name that already exists
/// refers to that indicator (validate rejects the reuse).
struct DisjunctSpec {
  std::string indicator_name;
  std::vector<Constraint> constraints;
};

struct Diagnostic {
  enum class Kind {
    kUnboundedInDisjunct,
    kIndicatorReused,
    kCardinalityRange,
    kUndeclared,
    kNonlinearObjective,
    kNonfinite,
    kStructure,
  };
  Kind kind;
  std::string message;
};

/// GDP model container. Construction is single-threaded; a finished model is
/// read-only and may be shared.
class GdpModel {
 public:
  VarId add_variable(std::string name, double lower, double upper,
                     VarKind kind = VarKind::kContinuous);
  void add_constraint(Constraint constraint);
  /// Returns the indicator of each disjunct in order.
  std::vector<IndicatorId> add_disjunction(
      std::string name, std::vector<DisjunctSpec> disjuncts,
      std::optional<DisjunctRef> parent = std::nullopt);
  void add_proposition(Proposition prop, std::string label = {});
  void choose(Cardinality card, std::string label = {});
  void set_objective(Sense sense, Expr expr);
  void set_auto_select(std::size_t disjunction, bool enabled);

  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(VarId id) const;
  std::optional<VarId> find_variable(const std::string& name) const;

  const std::vector<Constraint>& constraints() const { return constraints_; }

  const std::vector<Disjunction>& disjunctions() const { return disjunctions_; }
  std::optional<std::size_t> find_disjunction(const std::string& name) const;

  const std::vector<IndicatorDecl>& indicators() const { return indicators_; }
  const IndicatorDecl& indicator(IndicatorId id) const;
  std::optional<IndicatorId> find_indicator(const std::string& name) const;

  const std::vector<LabeledProposition>& propositions() const {
    return propositions_;
  }
  const std::vector<LabeledCardinality>& cardinalities() const {
    return cardinalities_;
  }
  const Objective& objective() const { return objective_; }

  /// Indicators of a disjunction in disjunct order.
  std::vector<IndicatorId> indicators_of(std::size_t disjunction) const;
  /// Nesting depth of a disjunction; top level is 0.
  std::size_t depth(std::size_t disjunction) const;

  bool operator==(const GdpModel&) const = default;

 private:
  void check_expr(const Expr& expr, const std::string& where) const;
  void check_indicator(IndicatorId id) const;

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<Disjunction> disjunctions_;
  std::vector<IndicatorDecl> indicators_;
  std::vector<LabeledProposition> propositions_;
  std::vector<LabeledCardinality> cardinalities_;
  Objective objective_;
};

/// Structural checks required before reformulation; empty means clean.
std::vector<Diagnostic> validate(const GdpModel& model);

/// Index of a cardinality constraint whose indicator set equals the
/// disjunction's, if any.
std::optional<std::size_t> covering_selection(const GdpModel& model,
                                              std::size_t disjunction);

}  // namespace gdpkit
