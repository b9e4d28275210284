#include "gdpkit/reformulate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gdpkit/error.hpp"
#include "gdpkit/interval.hpp"

namespace gdpkit {

const char* to_string(Method method) {
  return method == Method::kBigM ? "bigm" : "hull";
}

MSpec MSpec::uniform(double m) {
  MSpec spec;
  spec.global = m;
  return spec;
}

NlExpr perspective_epsilon(const NlExpr& h, VarId y,
                           const std::map<VarId, VarId>& disaggregated,
                           double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(Errc::kInvalidArgument, "epsilon must lie in (0, 1)");
  }
  AffineExpr sigma = AffineExpr::term(y, 1.0 - epsilon);
  sigma.add_constant(epsilon);

  Point origin;
  for (VarId var : variables_of(h)) origin[var] = 0.0;
  const double h_at_zero = evaluate(h, origin);

  // -eps * h(0) * (1 - y)
  AffineExpr tail = AffineExpr::term(y, epsilon * h_at_zero);
  tail.add_constant(-epsilon * h_at_zero);

  NlExpr scaled = substitute_scaled(rename_variables(h, disaggregated), sigma);
  return NlExpr::sum({NlExpr::product({NlExpr::from_affine(sigma), scaled}),
                      NlExpr::from_affine(tail)});
}

namespace {

void require_valid(const GdpModel& model) {
  const auto diagnostics = validate(model);
  if (diagnostics.empty()) return;
  std::string message = "model failed validation:";
  for (const auto& d : diagnostics) message += "\n  " + d.message;
  throw Error(Errc::kValidation, message);
}

/// The hull aggregation x = sum of copies is exact only when one disjunct
/// (or, nested, one per active parent) is selected.
void require_exclusive(const GdpModel& model) {
  for (std::size_t k = 0; k < model.disjunctions().size(); ++k) {
    const auto cover = covering_selection(model, k);
    if (!cover) continue;
    const Cardinality& card = model.cardinalities()[*cover].card;
    const bool exclusive =
        card.mode == CardinalityMode::kExactly &&
        (std::holds_alternative<IndicatorId>(card.count) ||
         std::get<int>(card.count) == 1);
    if (!exclusive) {
      throw Error(Errc::kValidation,
                  "hull reformulation needs exactly one selected disjunct in '" +
                      model.disjunctions()[k].name + "'; constraint '" +
                      model.cardinalities()[*cover].label + "' allows otherwise");
    }
  }
}

std::vector<Interval> box_of(const MilpModel& milp) {
  std::vector<Interval> box;
  box.reserve(milp.variables.size());
  for (const auto& var : milp.variables) box.push_back({var.lower, var.upper});
  return box;
}

std::vector<DisjunctRef> prefixed(const DisjunctRef& head,
                                  const std::vector<DisjunctRef>& tail) {
  std::vector<DisjunctRef> path{head};
  path.insert(path.end(), tail.begin(), tail.end());
  return path;
}

class Flattener {
 public:
  Flattener(const GdpModel& model, const ReformulateOptions& options)
      : model_(model), options_(options) {}

  void prepare() {
    if (options_.method == Method::kHull &&
        !(options_.epsilon > 0.0 && options_.epsilon < 1.0)) {
      throw Error(Errc::kInvalidArgument, "epsilon must lie in (0, 1)");
    }
    require_valid(model_);
    if (options_.method == Method::kHull) require_exclusive(model_);
    flat_.hull.epsilon = options_.epsilon;
    declare_variables();
    mark_removed();
    emit_globals();
    collect_disjunctions();
    fold_nested();
    emit_linkage();
  }

  /// Rows produced by reformulating one disjunction; new variables go
  /// straight into the base model.
  std::vector<FlatRow> transform(const FlatDisjunction& fd) {
    return options_.method == Method::kBigM ? transform_bigm(fd)
                                            : transform_hull(fd);
  }

  FlatGdp& flat() { return flat_; }

 private:
  void declare_variables() {
    for (const auto& var : model_.variables()) {
      flat_.base.add_variable(var.name, var.lower, var.upper,
                              var.kind == VarKind::kBinary);
    }
    for (const auto& decl : model_.indicators()) {
      const VarId y = flat_.base.add_variable(decl.name, 0.0, 1.0, true);
      flat_.binaries[decl.id] = y;
    }
    for (const auto& [id, value] : options_.fixed) {
      auto it = flat_.binaries.find(id);
      if (it == flat_.binaries.end()) {
        throw Error(Errc::kUnmappedIndicator,
                    "fixing refers to unknown indicator " +
                        std::to_string(id.value));
      }
      auto& var = flat_.base.variables[it->second.value];
      if (value) {
        var.lower = 1.0;
      } else {
        var.upper = 0.0;
      }
    }
  }

  void mark_removed() {
    for (const auto& [id, value] : options_.fixed) {
      if (!value) removed_.insert(model_.indicator(id).owner);
    }
    // Parents are declared before their children, so one pass suffices.
    for (std::size_t k = 0; k < model_.disjunctions().size(); ++k) {
      const auto& disjunction = model_.disjunctions()[k];
      if (!disjunction.parent || !removed_.count(*disjunction.parent)) continue;
      for (std::size_t i = 0; i < disjunction.disjuncts.size(); ++i) {
        removed_.insert(DisjunctRef{k, i});
        const VarId y = flat_.binaries.at(disjunction.disjuncts[i].indicator);
        flat_.base.variables[y.value].upper = 0.0;
      }
    }
  }

  void emit_globals() {
    const auto& globals = model_.constraints();
    for (std::size_t j = 0; j < globals.size(); ++j) {
      const Constraint& con = globals[j];
      std::string name = con.label.empty() ? "g" + std::to_string(j + 1)
                                           : con.label;
      emit(FlatRow{Constraint{con.body, con.relation, con.rhs, name},
                   Provenance{RowOrigin::kGlobal, {}}, con.label});
    }
  }

  void collect_disjunctions() {
    const auto& all = model_.disjunctions();
    for (std::size_t k = 0; k < all.size(); ++k) {
      FlatDisjunction fd;
      fd.index = k;
      for (std::size_t i = 0; i < all[k].disjuncts.size(); ++i) {
        const DisjunctRef ref{k, i};
        if (removed_.count(ref)) continue;
        const Disjunct& d = all[k].disjuncts[i];
        FlatDisjunct out{ref, d.indicator, flat_.binaries.at(d.indicator), {}};
        const std::string& ind = model_.indicator(d.indicator).name;
        for (std::size_t j = 0; j < d.constraints.size(); ++j) {
          const Constraint& con = d.constraints[j];
          std::string name = con.label.empty()
                                 ? ind + "_c" + std::to_string(j + 1)
                                 : con.label;
          out.rows.push_back(
              FlatRow{Constraint{con.body, con.relation, con.rhs, name},
                      Provenance{RowOrigin::kDisjunct, {ref}}, con.label});
        }
        fd.disjuncts.push_back(std::move(out));
      }
      pending_.push_back(std::move(fd));
    }
  }

  void fold_nested() {
    const auto& all = model_.disjunctions();
    std::vector<std::size_t> order(all.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return model_.depth(a) > model_.depth(b);
    });
    for (std::size_t k : order) {
      const auto& parent = all[k].parent;
      if (!parent) continue;
      if (removed_.count(*parent)) continue;
      std::vector<FlatRow> rows = transform(pending_[k]);
      auto& siblings = pending_[parent->disjunction].disjuncts;
      auto host = std::find_if(siblings.begin(), siblings.end(),
                               [&](const FlatDisjunct& d) {
                                 return d.ref == *parent;
                               });
      for (auto& row : rows) {
        row.provenance.path = prefixed(*parent, row.provenance.path);
        host->rows.push_back(std::move(row));
      }
    }
    for (std::size_t k = 0; k < all.size(); ++k) {
      if (!all[k].parent) flat_.top_level.push_back(std::move(pending_[k]));
    }
  }

  void emit_linkage() {
    const auto& all = model_.disjunctions();
    for (std::size_t k = 0; k < all.size(); ++k) {
      if (!all[k].parent || !all[k].auto_select) continue;
      if (covering_selection(model_, k)) continue;
      AffineExpr sum;
      for (IndicatorId id : model_.indicators_of(k)) {
        sum.add_term(flat_.binaries.at(id), 1.0);
      }
      const IndicatorId owner =
          all[all[k].parent->disjunction].disjuncts[all[k].parent->disjunct]
              .indicator;
      sum.add_term(flat_.binaries.at(owner), -1.0);
      flat_.base.add_row("link_" + all[k].name, std::move(sum),
                         Relation::kEqual, 0.0,
                         Provenance{RowOrigin::kLinkage, {}});
    }
  }

 public:
  void emit(FlatRow row) {
    if (row.con.is_affine()) {
      flat_.base.add_row(row.con.label, row.con.affine(), row.con.relation,
                         row.con.rhs, std::move(row.provenance));
      return;
    }
    flat_.base.nonlinear_rows.push_back(
        NonlinearRow{row.con.label, std::get<NlExpr>(row.con.body),
                     row.con.relation, row.con.rhs, std::move(row.provenance)});
  }

 private:
  std::optional<double> explicit_m(const FlatRow& row, const FlatDisjunct& d,
                                   const std::string& disjunction) const {
    const MSpec& spec = options_.big_m;
    auto pick = [](const std::map<std::string, double>& table,
                   const std::string& key) -> std::optional<double> {
      auto it = table.find(key);
      if (it == table.end()) return std::nullopt;
      return it->second;
    };
    std::optional<double> m = pick(spec.per_constraint, row.source_label);
    if (!m) m = pick(spec.per_disjunct, model_.indicator(d.indicator).name);
    if (!m) m = pick(spec.per_disjunction, disjunction);
    if (!m) m = spec.global;
    if (m && !(*m >= 0.0 && std::isfinite(*m))) {
      throw Error(Errc::kInvalidArgument,
                  "Big-M for '" + row.con.label + "' must be finite and >= 0");
    }
    return m;
  }

  std::vector<FlatRow> transform_bigm(const FlatDisjunction& fd) {
    const std::string& name = model_.disjunctions()[fd.index].name;
    std::vector<FlatRow> out;
    for (const auto& d : fd.disjuncts) {
      const auto fixed = options_.fixed.find(d.indicator);
      const bool enforced = fixed != options_.fixed.end() && fixed->second;
      for (const auto& row : d.rows) {
        const Constraint& con = row.con;
        struct Side {
          Relation relation;
          std::string suffix;
        };
        std::vector<Side> sides;
        if (con.relation == Relation::kEqual) {
          sides = {{Relation::kLessEqual, "_ub"}, {Relation::kGreaterEqual, "_lb"}};
        } else {
          sides = {{con.relation, ""}};
        }
        for (const auto& side : sides) {
          double m = 0.0;
          if (!enforced) {
            if (auto given = explicit_m(row, d, name)) {
              m = *given;
            } else if (!con.is_affine()) {
              throw Error(Errc::kMissingBigM,
                          "nonlinear constraint '" + con.label +
                              "' needs an explicit Big-M value");
            } else {
              const auto box = box_of(flat_.base);
              m = side.relation == Relation::kLessEqual
                      ? tight_m(Constraint{con.body, Relation::kLessEqual,
                                           con.rhs, con.label},
                                box)
                      : tight_m(Constraint{-con.affine(), Relation::kLessEqual,
                                           -con.rhs, con.label},
                                box);
            }
          }
          // body <= rhs + M(1 - y)  or  body >= rhs - M(1 - y)
          const double sign = side.relation == Relation::kLessEqual ? 1.0 : -1.0;
          const AffineExpr slack = AffineExpr::term(d.binary, sign * m);
          Expr body;
          if (con.is_affine()) {
            body = con.affine() + slack;
          } else {
            body = NlExpr::sum(
                {std::get<NlExpr>(con.body), NlExpr::from_affine(slack)});
          }
          out.push_back(FlatRow{
              Constraint{std::move(body), side.relation, con.rhs + sign * m,
                         con.label + side.suffix},
              row.provenance, row.source_label});
        }
      }
    }
    return out;
  }

  std::vector<FlatRow> transform_hull(const FlatDisjunction& fd) {
    const std::string& name = model_.disjunctions()[fd.index].name;
    MilpModel& base = flat_.base;
    std::set<VarId> touched;
    for (const auto& d : fd.disjuncts) {
      for (const auto& row : d.rows) touched.merge(variables_of(row.con.body));
    }
    std::vector<FlatRow> out;
    std::map<VarId, AffineExpr> aggregation;
    for (VarId v : touched) aggregation[v] = AffineExpr::term(v);

    for (const auto& d : fd.disjuncts) {
      std::map<VarId, VarId> copies;
      for (VarId v : touched) {
        const MilpVariable source = base.variables[v.value];
        if (!std::isfinite(source.lower) || !std::isfinite(source.upper)) {
          throw Error(Errc::kUnboundedVariable,
                      "variable '" + source.name +
                          "' needs finite bounds for the hull reformulation");
        }
        const std::string copy_name = source.name + "__" + name + "__" +
                                      std::to_string(d.ref.disjunct + 1);
        const VarId copy =
            base.add_variable(copy_name, std::min(source.lower, 0.0),
                              std::max(source.upper, 0.0));
        copies[v] = copy;
        flat_.hull.disaggregated[{v, d.ref}] = copy;
        aggregation[v].add_term(copy, -1.0);
        const Provenance prov{RowOrigin::kHullBound, {d.ref}};
        if (source.upper != 0.0) {
          AffineExpr ub = AffineExpr::term(copy);
          ub.add_term(d.binary, -source.upper);
          out.push_back(FlatRow{
              Constraint{std::move(ub), Relation::kLessEqual, 0.0,
                         copy_name + "_ub"},
              prov, {}});
        }
        if (source.lower != 0.0) {
          AffineExpr lb = AffineExpr::term(copy);
          lb.add_term(d.binary, -source.lower);
          out.push_back(FlatRow{
              Constraint{std::move(lb), Relation::kGreaterEqual, 0.0,
                         copy_name + "_lb"},
              prov, {}});
        }
      }
      for (const auto& row : d.rows) {
        const Constraint& con = row.con;
        if (con.is_affine()) {
          // a.x + c (rel) b  ->  a.x_i - (b - c) y (rel) 0
          const AffineExpr& body = con.affine();
          AffineExpr lifted;
          for (const auto& [var, coeff] : body.terms()) {
            lifted.add_term(copies.at(var), coeff);
          }
          lifted.add_term(d.binary, -(con.rhs - body.constant()));
          out.push_back(FlatRow{
              Constraint{std::move(lifted), con.relation, 0.0, con.label},
              row.provenance, row.source_label});
        } else {
          const NlExpr h = NlExpr::sum(
              {std::get<NlExpr>(con.body), NlExpr::constant(-con.rhs)});
          out.push_back(FlatRow{
              Constraint{perspective_epsilon(h, d.binary, copies,
                                             options_.epsilon),
                         con.relation, 0.0, con.label},
              row.provenance, row.source_label});
        }
      }
    }
    if (fd.disjuncts.empty()) return out;
    for (auto& [v, expr] : aggregation) {
      out.push_back(FlatRow{
          Constraint{std::move(expr), Relation::kEqual, 0.0,
                     base.variables[v.value].name + "__" + name + "_agg"},
          Provenance{RowOrigin::kHullAggregation, {}}, {}});
    }
    return out;
  }

  const GdpModel& model_;
  const ReformulateOptions& options_;
  FlatGdp flat_;
  std::set<DisjunctRef> removed_;
  std::vector<FlatDisjunction> pending_;
};

}  // namespace

FlatGdp nested_flatten(const GdpModel& model,
                       const ReformulateOptions& options) {
  Flattener flattener(model, options);
  flattener.prepare();
  return std::move(flattener.flat());
}

Reformulation reformulate(const GdpModel& model,
                          const ReformulateOptions& options) {
  Flattener flattener(model, options);
  flattener.prepare();
  FlatGdp& flat = flattener.flat();

  for (const auto& fd : flat.top_level) {
    for (auto& row : flattener.transform(fd)) flattener.emit(std::move(row));
  }

  MilpModel& milp = flat.base;
  const auto& all = model.disjunctions();
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (all[k].parent || !all[k].auto_select) continue;
    if (covering_selection(model, k)) continue;
    AffineExpr sum;
    for (IndicatorId id : model.indicators_of(k)) {
      sum.add_term(flat.binaries.at(id), 1.0);
    }
    milp.add_row("select_" + all[k].name, std::move(sum), Relation::kEqual, 1.0,
                 Provenance{RowOrigin::kSelection, {}});
  }

  for (const auto& entry : model.propositions()) {
    const CnfFormula cnf = to_cnf(entry.prop);
    for (std::size_t j = 0; j < cnf.clauses.size(); ++j) {
      Constraint con = clause_to_linear(cnf.clauses[j], flat.binaries);
      std::string name = cnf.clauses.size() == 1
                             ? entry.label
                             : entry.label + "_" + std::to_string(j + 1);
      milp.add_row(std::move(name), con.affine(), con.relation, con.rhs,
                   Provenance{RowOrigin::kLogic, {}});
    }
  }
  for (const auto& entry : model.cardinalities()) {
    Constraint con = cardinality_to_linear(entry.card, flat.binaries);
    milp.add_row(entry.label, con.affine(), con.relation, con.rhs,
                 Provenance{RowOrigin::kLogic, {}});
  }

  milp.sense = model.objective().sense;
  auto objective = std::visit(
      [](const auto& e) -> std::optional<AffineExpr> {
        if constexpr (std::is_same_v<std::decay_t<decltype(e)>, AffineExpr>) {
          return e;
        } else {
          return to_affine(e);
        }
      },
      model.objective().expr);
  milp.objective = *objective;

  Reformulation out;
  out.num_original = model.variables().size();
  out.binaries = flat.binaries;
  out.hull = std::move(flat.hull);
  out.milp = std::move(milp);
  return out;
}

Reformulation reformulate_bigm(const GdpModel& model, const MSpec& spec) {
  ReformulateOptions options;
  options.method = Method::kBigM;
  options.big_m = spec;
  return reformulate(model, options);
}

Reformulation reformulate_hull(const GdpModel& model, double epsilon) {
  ReformulateOptions options;
  options.method = Method::kHull;
  options.epsilon = epsilon;
  return reformulate(model, options);
}

}  // namespace gdpkit
