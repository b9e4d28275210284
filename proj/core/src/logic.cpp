#include "gdpkit/logic.hpp"

#include <algorithm>
#include <iterator>
#include <optional>
#include <string>
#include <utility>

#include "gdpkit/error.hpp"

namespace gdpkit {

struct Proposition::Node {
  Kind kind = Kind::kLiteral;
  Literal lit;
  std::vector<Proposition> children;
};

Proposition Proposition::literal(IndicatorId indicator, bool negated) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kLiteral;
  node->lit = Literal{indicator, negated};
  return Proposition(std::move(node));
}

Proposition Proposition::negation(Proposition child) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kNot;
  node->children.push_back(std::move(child));
  return Proposition(std::move(node));
}

Proposition Proposition::all_of(std::vector<Proposition> children) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kAnd;
  node->children = std::move(children);
  return Proposition(std::move(node));
}

Proposition Proposition::any_of(std::vector<Proposition> children) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kOr;
  node->children = std::move(children);
  return Proposition(std::move(node));
}

Proposition Proposition::implies(Proposition lhs, Proposition rhs) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kImplies;
  node->children = {std::move(lhs), std::move(rhs)};
  return Proposition(std::move(node));
}

Proposition Proposition::iff(Proposition lhs, Proposition rhs) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kIff;
  node->children = {std::move(lhs), std::move(rhs)};
  return Proposition(std::move(node));
}

Proposition::Kind Proposition::kind() const { return node_->kind; }
Literal Proposition::lit() const { return node_->lit; }
std::span<const Proposition> Proposition::children() const {
  return node_->children;
}

bool Proposition::operator==(const Proposition& other) const {
  if (node_ == other.node_) return true;
  if (node_->kind != other.node_->kind) return false;
  if (node_->kind == Kind::kLiteral) return node_->lit == other.node_->lit;
  return node_->children == other.node_->children;
}

namespace {

bool value_of(Literal lit, std::span<const bool> assignment) {
  if (lit.indicator.value >= assignment.size()) {
    throw Error(Errc::kUndeclared, "indicator " +
                                       std::to_string(lit.indicator.value) +
                                       " outside the assignment");
  }
  return assignment[lit.indicator.value] != lit.negated;
}

}  // namespace

bool evaluate(const Proposition& prop, std::span<const bool> assignment) {
  const auto kids = prop.children();
  switch (prop.kind()) {
    case Proposition::Kind::kLiteral: return value_of(prop.lit(), assignment);
    case Proposition::Kind::kNot: return !evaluate(kids[0], assignment);
    case Proposition::Kind::kAnd:
      return std::all_of(kids.begin(), kids.end(), [&](const auto& c) {
        return evaluate(c, assignment);
      });
    case Proposition::Kind::kOr:
      return std::any_of(kids.begin(), kids.end(), [&](const auto& c) {
        return evaluate(c, assignment);
      });
    case Proposition::Kind::kImplies:
      return !evaluate(kids[0], assignment) || evaluate(kids[1], assignment);
    case Proposition::Kind::kIff:
      return evaluate(kids[0], assignment) == evaluate(kids[1], assignment);
  }
  return false;
}

bool evaluate(const Clause& clause, std::span<const bool> assignment) {
  return std::any_of(clause.begin(), clause.end(),
                     [&](Literal lit) { return value_of(lit, assignment); });
}

bool evaluate(const CnfFormula& cnf, std::span<const bool> assignment) {
  return std::all_of(cnf.clauses.begin(), cnf.clauses.end(),
                     [&](const Clause& c) { return evaluate(c, assignment); });
}

std::set<IndicatorId> indicators_of(const Proposition& prop) {
  std::set<IndicatorId> out;
  if (prop.kind() == Proposition::Kind::kLiteral) {
    out.insert(prop.lit().indicator);
  }
  for (const auto& child : prop.children()) out.merge(indicators_of(child));
  return out;
}

// ---------------------------------------------------------------------------
// CNF conversion

namespace {

using P = Proposition;

// Rewrites iff as two implications and implications as (not A) or B.
P eliminate_arrows(const P& prop) {
  auto kids = prop.children();
  switch (prop.kind()) {
    case P::Kind::kLiteral: return prop;
    case P::Kind::kNot: return P::negation(eliminate_arrows(kids[0]));
    case P::Kind::kAnd:
    case P::Kind::kOr: {
      std::vector<P> out;
      for (const auto& child : kids) out.push_back(eliminate_arrows(child));
      return prop.kind() == P::Kind::kAnd ? P::all_of(std::move(out))
                                          : P::any_of(std::move(out));
    }
    case P::Kind::kImplies:
      return P::any_of({P::negation(eliminate_arrows(kids[0])),
                        eliminate_arrows(kids[1])});
    case P::Kind::kIff: {
      const P a = eliminate_arrows(kids[0]);
      const P b = eliminate_arrows(kids[1]);
      return P::all_of({P::any_of({P::negation(a), b}),
                        P::any_of({P::negation(b), a})});
    }
  }
  return prop;
}

// Pushes negations to the literals (De Morgan and double negation).
P push_negations(const P& prop, bool negate) {
  auto kids = prop.children();
  switch (prop.kind()) {
    case P::Kind::kLiteral: {
      const Literal lit = prop.lit();
      return P::literal(lit.indicator, lit.negated != negate);
    }
    case P::Kind::kNot: return push_negations(kids[0], !negate);
    case P::Kind::kAnd:
    case P::Kind::kOr: {
      std::vector<P> out;
      for (const auto& child : kids) out.push_back(push_negations(child, negate));
      const bool conj = (prop.kind() == P::Kind::kAnd) != negate;
      return conj ? P::all_of(std::move(out)) : P::any_of(std::move(out));
    }
    default:
      throw Error(Errc::kInvalidArgument, "arrows must be eliminated first");
  }
}

// Merges two clauses; nullopt when the result is a tautology.
std::optional<Clause> merge_clauses(const Clause& a, const Clause& b) {
  Clause out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].indicator == out[i - 1].indicator) return std::nullopt;
  }
  return out;
}

void append_unique(std::vector<Clause>& clauses, Clause clause) {
  if (std::find(clauses.begin(), clauses.end(), clause) == clauses.end()) {
    clauses.push_back(std::move(clause));
  }
}

// Distribution of OR over AND on a negation-normal-form tree.
std::vector<Clause> distribute(const P& prop) {
  switch (prop.kind()) {
    case P::Kind::kLiteral: return {Clause{prop.lit()}};
    case P::Kind::kAnd: {
      std::vector<Clause> out;
      for (const auto& child : prop.children()) {
        for (auto& clause : distribute(child)) {
          append_unique(out, std::move(clause));
        }
      }
      return out;
    }
    case P::Kind::kOr: {
      std::vector<Clause> acc{Clause{}};
      for (const auto& child : prop.children()) {
        const std::vector<Clause> rhs = distribute(child);
        std::vector<Clause> next;
        for (const auto& left : acc) {
          for (const auto& right : rhs) {
            if (auto merged = merge_clauses(left, right)) {
              append_unique(next, std::move(*merged));
            }
          }
        }
        acc = std::move(next);
        if (acc.empty()) break;
      }
      return acc;
    }
    default:
      throw Error(Errc::kInvalidArgument, "expected negation normal form");
  }
}

}  // namespace

CnfFormula to_cnf(const Proposition& prop) {
  const P nnf = push_negations(eliminate_arrows(prop), false);
  return CnfFormula{distribute(nnf)};
}

Proposition to_proposition(const CnfFormula& cnf) {
  std::vector<P> clauses;
  for (const auto& clause : cnf.clauses) {
    std::vector<P> lits;
    for (const auto& lit : clause) {
      lits.push_back(P::literal(lit.indicator, lit.negated));
    }
    clauses.push_back(P::any_of(std::move(lits)));
  }
  return P::all_of(std::move(clauses));
}

// ---------------------------------------------------------------------------
// Algebraic forms

const char* to_string(CardinalityMode mode) {
  switch (mode) {
    case CardinalityMode::kExactly: return "exactly";
    case CardinalityMode::kAtLeast: return "atleast";
    case CardinalityMode::kAtMost: return "atmost";
  }
  return "?";
}

bool evaluate(const Cardinality& card, std::span<const bool> assignment) {
  int count = 0;
  for (IndicatorId id : card.indicators) {
    count += value_of(Literal{id, false}, assignment) ? 1 : 0;
  }
  const int target =
      std::holds_alternative<int>(card.count)
          ? std::get<int>(card.count)
          : (value_of(Literal{std::get<IndicatorId>(card.count), false},
                      assignment)
                 ? 1
                 : 0);
  switch (card.mode) {
    case CardinalityMode::kExactly: return count == target;
    case CardinalityMode::kAtLeast: return count >= target;
    case CardinalityMode::kAtMost: return count <= target;
  }
  return false;
}

namespace {

VarId binary_of(IndicatorId id, const IndicatorMap& map) {
  auto it = map.find(id);
  if (it == map.end()) {
    throw Error(Errc::kUnmappedIndicator,
                "indicator " + std::to_string(id.value) +
                    " has no binary variable");
  }
  return it->second;
}

}  // namespace

Constraint clause_to_linear(const Clause& clause, const IndicatorMap& map) {
  AffineExpr body;
  double rhs = 1.0;
  bool all_negative = !clause.empty();
  for (const Literal& lit : clause) {
    const VarId y = binary_of(lit.indicator, map);
    if (lit.negated) {
      body.add_term(y, -1.0);
      rhs -= 1.0;
    } else {
      body.add_term(y, 1.0);
      all_negative = false;
    }
  }
  if (all_negative) {
    return Constraint{-body, Relation::kLessEqual, -rhs, {}};
  }
  return Constraint{std::move(body), Relation::kGreaterEqual, rhs, {}};
}

Constraint cardinality_to_linear(const Cardinality& card,
                                 const IndicatorMap& map) {
  AffineExpr body;
  for (IndicatorId id : card.indicators) body.add_term(binary_of(id, map), 1.0);
  double rhs = 0.0;
  if (std::holds_alternative<int>(card.count)) {
    rhs = std::get<int>(card.count);
  } else {
    body.add_term(binary_of(std::get<IndicatorId>(card.count), map), -1.0);
  }
  Relation relation = Relation::kEqual;
  if (card.mode == CardinalityMode::kAtLeast) relation = Relation::kGreaterEqual;
  if (card.mode == CardinalityMode::kAtMost) relation = Relation::kLessEqual;
  return Constraint{std::move(body), relation, rhs, {}};
}

}  // namespace gdpkit
