#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <variant>
#include <vector>

#include "gdpkit/expr.hpp"

namespace gdpkit {

/// Boolean indicator variable Y_ik of a disjunct.
struct IndicatorId {
  std::uint32_t value = 0;

  auto operator<=>(const IndicatorId&) const = default;
};

struct Literal {
  IndicatorId indicator;
  bool negated = false;

  auto operator<=>(const Literal&) const = default;
};

/// Immutable proposition tree over indicators.
class Proposition {
 public:
  enum class Kind { kLiteral, kNot, kAnd, kOr, kImplies, kIff };

  static Proposition literal(IndicatorId indicator, bool negated = false);
  static Proposition negation(Proposition child);
  static Proposition all_of(std::vector<Proposition> children);
  static Proposition any_of(std::vector<Proposition> children);
  static Proposition implies(Proposition lhs, Proposition rhs);
  static Proposition iff(Proposition lhs, Proposition rhs);

  Kind kind() const;
  /// Valid for kLiteral only.
  Literal lit() const;
  std::span<const Proposition> children() const;

  bool operator==(const Proposition& other) const;

 private:
  struct Node;
  explicit Proposition(std::shared_ptr<const Node> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Sorted, duplicate-free disjunction of literals.
using Clause = std::vector<Literal>;

struct CnfFormula {
  std::vector<Clause> clauses;

  bool operator==(const CnfFormula&) const = default;
};

/// `assignment[i]` is the truth value of indicator i.
bool evaluate(const Proposition& prop, std::span<const bool> assignment);
bool evaluate(const Clause& clause, std::span<const bool> assignment);
bool evaluate(const CnfFormula& cnf, std::span<const bool> assignment);

std::set<IndicatorId> indicators_of(const Proposition& prop);

/// Equivalence-preserving conversion: biconditional and implication
/// elimination, De Morgan, then distribution of OR over AND. Tautological
/// clauses are dropped and duplicate clauses merged, keeping first occurrence.
CnfFormula to_cnf(const Proposition& prop);

/// AND of ORs; `to_cnf(to_proposition(f)) == f` for any canonical f.
Proposition to_proposition(const CnfFormula& cnf);

enum class CardinalityMode { kExactly, kAtLeast, kAtMost };

const char* to_string(CardinalityMode mode);

/// exactly/atleast/atmost(count, indicators). The count is either a fixed
/// integer or another indicator (sum of indicators = y_count).
struct Cardinality {
  CardinalityMode mode = CardinalityMode::kExactly;
  std::variant<int, IndicatorId> count = 1;
  std::vector<IndicatorId> indicators;

  bool operator==(const Cardinality&) const = default;
};

bool evaluate(const Cardinality& card, std::span<const bool> assignment);

using IndicatorMap = std::map<IndicatorId, VarId>;

/// sum(y_i for positive literals) + sum(1 - y_i for negated ones) >= 1, in
/// canonical affine form. Purely negative clauses are emitted as
/// sum(y_i) <= |clause| - 1.
Constraint clause_to_linear(const Clause& clause, const IndicatorMap& map);

Constraint cardinality_to_linear(const Cardinality& card,
                                 const IndicatorMap& map);

}  // namespace gdpkit
