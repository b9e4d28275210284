#include "gdpkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gdpkit/error.hpp"

namespace gdpkit {

VarId GdpModel::add_variable(std::string name, double lower, double upper,
                             VarKind kind) {
  if (std::isnan(lower) || std::isnan(upper)) {
    throw Error(Errc::kInvalidArgument, "variable '" + name + "' has NaN bound");
  }
  if (lower > upper) {
    throw Error(Errc::kBoundOrder, "variable '" + name +
                                       "' has lower bound above upper bound");
  }
  if (kind == VarKind::kBinary && (lower != 0.0 || upper != 1.0)) {
    throw Error(Errc::kInvalidArgument,
                "binary variable '" + name + "' must have bounds [0, 1]");
  }
  if (find_variable(name)) {
    throw Error(Errc::kDuplicateName, "variable '" + name + "' already exists");
  }
  const VarId id{static_cast<std::uint32_t>(variables_.size())};
  variables_.push_back(Variable{id, std::move(name), lower, upper, kind});
  return id;
}

void GdpModel::check_expr(const Expr& expr, const std::string& where) const {
  for (VarId var : variables_of(expr)) {
    if (var.value >= variables_.size()) {
      throw Error(Errc::kUndeclared, where + " references undeclared variable id " +
                                         std::to_string(var.value));
    }
  }
}

void GdpModel::check_indicator(IndicatorId id) const {
  if (id.value >= indicators_.size()) {
    throw Error(Errc::kUndeclared,
                "unknown indicator id " + std::to_string(id.value));
  }
}

void GdpModel::add_constraint(Constraint constraint) {
  check_expr(constraint.body, "constraint '" + constraint.label + "'");
  constraints_.push_back(std::move(constraint));
}

std::vector<IndicatorId> GdpModel::add_disjunction(
    std::string name, std::vector<DisjunctSpec> disjuncts,
    std::optional<DisjunctRef> parent) {
  if (disjuncts.size() < 2) {
    throw Error(Errc::kInvalidArgument,
                "disjunction '" + name + "' needs at least two disjuncts");
  }
  if (find_disjunction(name)) {
    throw Error(Errc::kDuplicateName,
                "disjunction '" + name + "' already exists");
  }
  if (parent && (parent->disjunction >= disjunctions_.size() ||
                 parent->disjunct >=
                     disjunctions_[parent->disjunction].disjuncts.size())) {
    throw Error(Errc::kUndeclared,
                "parent disjunct of '" + name + "' does not exist");
  }
  for (const auto& spec : disjuncts) {
    for (const auto& con : spec.constraints) {
      check_expr(con.body, "disjunct constraint '" + con.label + "'");
    }
  }

  const std::size_t index = disjunctions_.size();
  Disjunction disjunction;
  disjunction.name = name;
  disjunction.parent = parent;
  std::vector<IndicatorId> ids;
  for (std::size_t k = 0; k < disjuncts.size(); ++k) {
    std::string ind_name = disjuncts[k].indicator_name.empty()
                               ? name + "_" + std::to_string(k + 1)
                               : disjuncts[k].indicator_name;
    IndicatorId id;
    if (auto existing = find_indicator(ind_name)) {
      id = *existing;
    } else {
      id = IndicatorId{static_cast<std::uint32_t>(indicators_.size())};
      indicators_.push_back(
          IndicatorDecl{id, std::move(ind_name), DisjunctRef{index, k}});
    }
    ids.push_back(id);
    disjunction.disjuncts.push_back(
        Disjunct{id, std::move(disjuncts[k].constraints), {}});
  }
  disjunctions_.push_back(std::move(disjunction));
  if (parent) {
    disjunctions_[parent->disjunction]
        .disjuncts[parent->disjunct]
        .nested.push_back(index);
  }
  return ids;
}

void GdpModel::add_proposition(Proposition prop, std::string label) {
  for (IndicatorId id : gdpkit::indicators_of(prop)) check_indicator(id);
  if (label.empty()) label = "prop" + std::to_string(propositions_.size() + 1);
  propositions_.push_back(LabeledProposition{std::move(label), std::move(prop)});
}

void GdpModel::choose(Cardinality card, std::string label) {
  for (IndicatorId id : card.indicators) check_indicator(id);
  if (auto* count = std::get_if<IndicatorId>(&card.count)) {
    check_indicator(*count);
  } else if (std::get<int>(card.count) < 0) {
    throw Error(Errc::kInvalidArgument, "cardinality count must be nonnegative");
  }
  if (label.empty()) label = "card" + std::to_string(cardinalities_.size() + 1);
  cardinalities_.push_back(LabeledCardinality{std::move(label), std::move(card)});
}

void GdpModel::set_objective(Sense sense, Expr expr) {
  check_expr(expr, "objective");
  objective_ = Objective{sense, std::move(expr)};
}

void GdpModel::set_auto_select(std::size_t disjunction, bool enabled) {
  disjunctions_.at(disjunction).auto_select = enabled;
}

const Variable& GdpModel::variable(VarId id) const {
  return variables_.at(id.value);
}

std::optional<VarId> GdpModel::find_variable(const std::string& name) const {
  for (const auto& var : variables_) {
    if (var.name == name) return var.id;
  }
  return std::nullopt;
}

std::optional<std::size_t> GdpModel::find_disjunction(
    const std::string& name) const {
  for (std::size_t i = 0; i < disjunctions_.size(); ++i) {
    if (disjunctions_[i].name == name) return i;
  }
  return std::nullopt;
}

const IndicatorDecl& GdpModel::indicator(IndicatorId id) const {
  return indicators_.at(id.value);
}

std::optional<IndicatorId> GdpModel::find_indicator(
    const std::string& name) const {
  for (const auto& decl : indicators_) {
    if (decl.name == name) return decl.id;
  }
  return std::nullopt;
}

std::vector<IndicatorId> GdpModel::indicators_of(std::size_t disjunction) const {
  std::vector<IndicatorId> out;
  for (const auto& d : disjunctions_.at(disjunction).disjuncts) {
    out.push_back(d.indicator);
  }
  return out;
}

std::size_t GdpModel::depth(std::size_t disjunction) const {
  std::size_t level = 0;
  auto parent = disjunctions_.at(disjunction).parent;
  while (parent) {
    ++level;
    parent = disjunctions_.at(parent->disjunction).parent;
  }
  return level;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> covering_selection(const GdpModel& model,
                                              std::size_t disjunction) {
  auto own = model.indicators_of(disjunction);
  std::sort(own.begin(), own.end());
  const auto& cards = model.cardinalities();
  for (std::size_t i = 0; i < cards.size(); ++i) {
    auto listed = cards[i].card.indicators;
    std::sort(listed.begin(), listed.end());
    listed.erase(std::unique(listed.begin(), listed.end()), listed.end());
    if (listed == own) return i;
  }
  return std::nullopt;
}

std::vector<Diagnostic> validate(const GdpModel& model) {
  std::vector<Diagnostic> out;
  const auto& vars = model.variables();
  const auto n_ind = model.indicators().size();

  auto check_finite = [&](const Constraint& con) {
    bool finite = std::isfinite(con.rhs);
    if (con.is_affine()) {
      finite = finite && std::isfinite(con.affine().constant());
      for (const auto& entry : con.affine().terms()) {
        finite = finite && std::isfinite(entry.second);
      }
    }
    if (!finite) {
      out.push_back({Diagnostic::Kind::kNonfinite,
                     "constraint '" + con.label + "' has a nonfinite value"});
    }
  };

  for (const auto& con : model.constraints()) check_finite(con);

  std::map<IndicatorId, int> uses;
  for (std::size_t k = 0; k < model.disjunctions().size(); ++k) {
    const auto& disjunction = model.disjunctions()[k];
    if (disjunction.disjuncts.size() < 2) {
      out.push_back({Diagnostic::Kind::kStructure,
                     "disjunction '" + disjunction.name +
                         "' has fewer than two disjuncts"});
    }
    std::set<IndicatorId> local;
    for (const auto& disjunct : disjunction.disjuncts) {
      if (disjunct.indicator.value >= n_ind) {
        out.push_back({Diagnostic::Kind::kUndeclared,
                       "disjunction '" + disjunction.name +
                           "' uses an undeclared indicator"});
        continue;
      }
      ++uses[disjunct.indicator];
      const std::string& ind = model.indicator(disjunct.indicator).name;
      std::set<VarId> reported;
      for (const auto& con : disjunct.constraints) {
        check_finite(con);
        for (VarId var : variables_of(con.body)) {
          if (var.value >= vars.size()) {
            out.push_back({Diagnostic::Kind::kUndeclared,
                           "disjunct '" + ind +
                               "' references an undeclared variable"});
            continue;
          }
          const Variable& v = vars[var.value];
          if ((!std::isfinite(v.lower) || !std::isfinite(v.upper)) &&
              reported.insert(var).second) {
            out.push_back({Diagnostic::Kind::kUnboundedInDisjunct,
                           "variable '" + v.name + "' in disjunct '" + ind +
                               "' of disjunction '" + disjunction.name +
                               "' needs finite bounds"});
          }
        }
      }
    }
  }
  for (const auto& [id, count] : uses) {
    if (count > 1) {
      out.push_back({Diagnostic::Kind::kIndicatorReused,
                     "indicator '" + model.indicator(id).name + "' appears in " +
                         std::to_string(count) + " disjuncts"});
    }
  }

  for (const auto& entry : model.cardinalities()) {
    const auto& card = entry.card;
    for (IndicatorId id : card.indicators) {
      if (id.value >= n_ind) {
        out.push_back({Diagnostic::Kind::kUndeclared,
                       "cardinality '" + entry.label +
                           "' uses an undeclared indicator"});
      }
    }
    if (const int* n = std::get_if<int>(&card.count)) {
      if (*n < 0 || static_cast<std::size_t>(*n) > card.indicators.size()) {
        out.push_back({Diagnostic::Kind::kCardinalityRange,
                       "cardinality '" + entry.label + "' asks for " +
                           std::to_string(*n) + " of " +
                           std::to_string(card.indicators.size()) +
                           " indicators"});
      }
    }
  }
  for (const auto& entry : model.propositions()) {
    for (IndicatorId id : indicators_of(entry.prop)) {
      if (id.value >= n_ind) {
        out.push_back({Diagnostic::Kind::kUndeclared,
                       "proposition '" + entry.label +
                           "' uses an undeclared indicator"});
      }
    }
  }

  if (linearity_of(model.objective().expr) != Linearity::kAffine) {
    out.push_back({Diagnostic::Kind::kNonlinearObjective,
                   "objective must be affine"});
  }
  return out;
}

}  // namespace gdpkit
