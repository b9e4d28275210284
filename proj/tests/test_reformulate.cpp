#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gdpkit/error.hpp"
#include "gdpkit/milp.hpp"
#include "gdpkit/reformulate.hpp"
#include "support/oracles.hpp"

namespace gdpkit {
namespace {

const LinearRow& row_named(const MilpModel& m, const std::string& name) {
  for (const auto& row : m.rows) {
    if (row.name == name) return row;
  }
  throw std::runtime_error("no row " + name);
}

std::size_t count(const MilpModel& m, RowOrigin origin) {
  const auto counts = m.row_counts();
  auto it = counts.find(origin);
  return it == counts.end() ? 0 : it->second;
}

/// LP relaxation with the indicator binaries pinned to an assignment.
LpSolution solve_fixed(const Reformulation& r,
                       const std::vector<bool>& assignment) {
  std::vector<double> lo, hi;
  for (const auto& v : r.milp.variables) {
    lo.push_back(v.lower);
    hi.push_back(v.upper);
  }
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const VarId y = r.binaries.at(IndicatorId{static_cast<std::uint32_t>(i)});
    lo[y.value] = hi[y.value] = assignment[i] ? 1.0 : 0.0;
  }
  return solve_lp(r.milp, lo, hi);
}

TEST(BigM, TwoRectangleRows) {
  const Reformulation r = reformulate_bigm(testing::two_rectangle());
  EXPECT_EQ(count(r.milp, RowOrigin::kDisjunct), 8u);
  EXPECT_EQ(count(r.milp, RowOrigin::kSelection), 1u);
  EXPECT_EQ(r.milp.rows.size(), 9u);
  EXPECT_EQ(r.milp.num_binaries(), 2u);
  // x1 <= 2 + 8 (1 - y1)
  const LinearRow& a2 = row_named(r.milp, "a2");
  const VarId y1 = r.binaries.at(IndicatorId{0});
  EXPECT_EQ(a2.relation, Relation::kLessEqual);
  EXPECT_EQ(a2.expr.coefficient(VarId{0}), 1.0);
  EXPECT_EQ(a2.expr.coefficient(y1), 8.0);
  EXPECT_EQ(a2.rhs, 10.0);
  const LinearRow& sel = row_named(r.milp, "select_D");
  EXPECT_EQ(sel.relation, Relation::kEqual);
  EXPECT_EQ(sel.rhs, 1.0);
}

TEST(BigM, GlobalValue) {
  const Reformulation r = reformulate_bigm(testing::two_rectangle(), MSpec::uniform(100));
  const LinearRow& a2 = row_named(r.milp, "a2");
  EXPECT_EQ(a2.expr.coefficient(r.binaries.at(IndicatorId{0})), 100.0);
  EXPECT_EQ(a2.rhs, 102.0);
}

TEST(BigM, RedundantConstraintUnchanged) {
  const Reformulation r = reformulate_bigm(testing::two_rectangle());
  const LinearRow& a1 = row_named(r.milp, "a1");
  EXPECT_EQ(a1.relation, Relation::kGreaterEqual);
  EXPECT_EQ(a1.expr.terms().size(), 1u);
  EXPECT_EQ(a1.rhs, 0.0);
}

TEST(BigM, LookupOrder) {
  MSpec spec;
  spec.global = 50;
  spec.per_disjunction["D"] = 40;
  spec.per_disjunct["Y2"] = 30;
  spec.per_constraint["b2"] = 20;
  const Reformulation r = reformulate_bigm(testing::two_rectangle(), spec);
  const VarId y1 = r.binaries.at(IndicatorId{0});
  const VarId y2 = r.binaries.at(IndicatorId{1});
  EXPECT_EQ(row_named(r.milp, "a2").expr.coefficient(y1), 40.0);
  EXPECT_EQ(row_named(r.milp, "b4").expr.coefficient(y2), 30.0);
  EXPECT_EQ(row_named(r.milp, "b2").expr.coefficient(y2), 20.0);
}

TEST(BigM, EqualitySplits) {
  const Reformulation r = reformulate_bigm(testing::superstructure());
  const LinearRow& ub = row_named(r.milp, "r1_cost_ub");
  const LinearRow& lb = row_named(r.milp, "r1_cost_lb");
  EXPECT_EQ(ub.relation, Relation::kLessEqual);
  EXPECT_EQ(lb.relation, Relation::kGreaterEqual);
}

TEST(BigM, NegativeMRejected) {
  try {
    reformulate_bigm(testing::two_rectangle(), MSpec::uniform(-1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInvalidArgument);
  }
}

TEST(BigM, NonlinearNeedsExplicitM) {
  GdpModel m;
  const VarId x = m.add_variable("x", 0, 3);
  m.add_disjunction(
      "D", {DisjunctSpec{"Y1", {Constraint{NlExpr::power(NlExpr::variable(x), 2),
                                           Relation::kLessEqual, 4, "q"}}},
            DisjunctSpec{"Y2", {Constraint{AffineExpr::term(x), Relation::kGreaterEqual, 2.5, "l"}}}});
  try {
    reformulate_bigm(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kMissingBigM);
  }
  const Reformulation r = reformulate_bigm(m, MSpec::uniform(5));
  EXPECT_EQ(r.milp.nonlinear_rows.size(), 1u);
}

TEST(Hull, TwoRectangleStructure) {
  const Reformulation r = reformulate_hull(testing::two_rectangle());
  EXPECT_EQ(r.hull.disaggregated.size(), 4u);
  EXPECT_EQ(count(r.milp, RowOrigin::kHullAggregation), 2u);
  EXPECT_EQ(count(r.milp, RowOrigin::kHullBound), 4u);
  EXPECT_EQ(r.milp.rows.size(), 15u);
  EXPECT_EQ(r.milp.variables.size(), 8u);
  // x1 = x1_1 + x1_2
  const LinearRow& agg = row_named(r.milp, "x1__D_agg");
  const VarId c1 = r.hull.disaggregated.at({VarId{0}, DisjunctRef{0, 0}});
  const VarId c2 = r.hull.disaggregated.at({VarId{0}, DisjunctRef{0, 1}});
  EXPECT_EQ(agg.relation, Relation::kEqual);
  EXPECT_EQ(agg.expr.coefficient(VarId{0}), 1.0);
  EXPECT_EQ(agg.expr.coefficient(c1), -1.0);
  EXPECT_EQ(agg.expr.coefficient(c2), -1.0);
  // 0 <= x1_1 <= 10 y1
  const LinearRow& ub = row_named(r.milp, "x1__D__1_ub");
  EXPECT_EQ(ub.expr.coefficient(c1), 1.0);
  EXPECT_EQ(ub.expr.coefficient(r.binaries.at(IndicatorId{0})), -10.0);
  EXPECT_EQ(r.milp.variables[c1.value].lower, 0.0);
  // x1 <= 2 lifts to x1_1 - 2 y1 <= 0
  const LinearRow& a2 = row_named(r.milp, "a2");
  EXPECT_EQ(a2.expr.coefficient(c1), 1.0);
  EXPECT_EQ(a2.expr.coefficient(r.binaries.at(IndicatorId{0})), -2.0);
  EXPECT_EQ(a2.rhs, 0.0);
}

TEST(Hull, SignedBoundsGiveTwoSidedCopy) {
  GdpModel m;
  const VarId x = m.add_variable("x", -5, 5);
  m.add_disjunction("D", {DisjunctSpec{"Y1", {Constraint{AffineExpr::term(x), Relation::kLessEqual, -1, "l"}}},
                          DisjunctSpec{"Y2", {Constraint{AffineExpr::term(x), Relation::kGreaterEqual, 1, "g"}}}});
  const Reformulation r = reformulate_hull(m);
  const VarId y1 = r.binaries.at(IndicatorId{0});
  const VarId c = r.hull.disaggregated.at({x, DisjunctRef{0, 0}});
  EXPECT_EQ(r.milp.variables[c.value].lower, -5.0);
  EXPECT_EQ(r.milp.variables[c.value].upper, 5.0);
  const LinearRow& ub = row_named(r.milp, "x__D__1_ub");
  const LinearRow& lb = row_named(r.milp, "x__D__1_lb");
  EXPECT_EQ(ub.expr.coefficient(y1), -5.0);
  EXPECT_EQ(ub.relation, Relation::kLessEqual);
  EXPECT_EQ(lb.expr.coefficient(y1), 5.0);
  EXPECT_EQ(lb.relation, Relation::kGreaterEqual);
}

TEST(Hull, VariableAbsentFromOneDisjunct) {
  GdpModel m;
  const VarId x1 = m.add_variable("x1", 0, 4);
  const VarId x2 = m.add_variable("x2", 0, 4);
  m.add_disjunction("D", {DisjunctSpec{"Y1", {Constraint{AffineExpr::term(x1), Relation::kLessEqual, 1, "p"}}},
                          DisjunctSpec{"Y2", {Constraint{AffineExpr::term(x2), Relation::kLessEqual, 1, "q"}}}});
  m.set_objective(Sense::kMaximize, AffineExpr::term(x1) + AffineExpr::term(x2));
  const Reformulation r = reformulate_hull(m);
  EXPECT_EQ(r.hull.disaggregated.count({x2, DisjunctRef{0, 0}}), 1u);
  EXPECT_EQ(r.hull.disaggregated.count({x1, DisjunctRef{0, 1}}), 1u);
  const MipSolution s = solve_mip(r.milp);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.objective, 5.0, 1e-7);
}

TEST(Hull, UnboundedVariableRejected) {
  GdpModel m;
  const VarId x = m.add_variable("x", 0, kInf);
  m.add_disjunction("D", {DisjunctSpec{"Y1", {Constraint{AffineExpr::term(x), Relation::kLessEqual, 1, "p"}}},
                          DisjunctSpec{"Y2", {}}});
  try {
    reformulate_hull(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kValidation);
    EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos);
  }
}

TEST(Hull, NonExclusiveSelectionRejected) {
  GdpModel m = testing::two_rectangle();
  m.choose(Cardinality{CardinalityMode::kAtMost, 1, {IndicatorId{0}, IndicatorId{1}}}, "some");
  try {
    reformulate_hull(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kValidation);
  }
  EXPECT_NO_THROW(reformulate_bigm(m));
}

TEST(Perspective, ActiveDisjunctRecoversH) {
  const VarId x{0};
  const VarId y{1};
  const VarId xc{2};
  const NlExpr h = NlExpr::sum({NlExpr::power(NlExpr::variable(x), 2), NlExpr::constant(-4)});
  const NlExpr p = perspective_epsilon(h, y, {{x, xc}}, 1e-4);
  EXPECT_NEAR(evaluate(p, Point{{y, 1.0}, {xc, 3.0}}), 5.0, 1e-12);
}

TEST(Perspective, InactiveDisjunctIsZero) {
  const VarId x{0};
  const VarId y{1};
  const VarId xc{2};
  const NlExpr h = NlExpr::sum({NlExpr::power(NlExpr::variable(x), 2), NlExpr::constant(-4)});
  const NlExpr p = perspective_epsilon(h, y, {{x, xc}}, 1e-4);
  EXPECT_NEAR(evaluate(p, Point{{y, 0.0}, {xc, 0.0}}), 0.0, 1e-12);
}

TEST(Perspective, LinearHAtHalf) {
  const VarId x{0};
  const VarId y{1};
  const VarId xc{2};
  const NlExpr p = perspective_epsilon(NlExpr::variable(x), y, {{x, xc}}, 1e-4);
  EXPECT_NEAR(evaluate(p, Point{{y, 0.5}, {xc, 1.0}}), 1.0, 1e-12);
}

TEST(Perspective, EpsilonRange) {
  const VarId x{0};
  for (double eps : {0.0, 1.0, -0.1}) {
    try {
      perspective_epsilon(NlExpr::variable(x), VarId{1}, {{x, VarId{2}}}, eps);
      FAIL() << eps;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kInvalidArgument);
    }
  }
}

TEST(Perspective, HullEmitsNonlinearRow) {
  GdpModel m;
  const VarId x = m.add_variable("x", 0, 3);
  m.add_disjunction(
      "D", {DisjunctSpec{"Y1", {Constraint{NlExpr::power(NlExpr::variable(x), 2),
                                           Relation::kLessEqual, 4, "q"}}},
            DisjunctSpec{"Y2", {Constraint{AffineExpr::term(x), Relation::kGreaterEqual, 2.5, "l"}}}});
  const Reformulation r = reformulate_hull(m);
  ASSERT_EQ(r.milp.nonlinear_rows.size(), 1u);
  EXPECT_EQ(r.milp.nonlinear_rows[0].rhs, 0.0);
}

TEST(NestedFlatten, Superstructure) {
  const GdpModel m = testing::superstructure();
  ReformulateOptions opts;
  opts.method = Method::kBigM;
  const FlatGdp flat = nested_flatten(m, opts);
  ASSERT_EQ(flat.top_level.size(), 1u);
  const FlatDisjunct& r2 = flat.top_level[0].disjuncts[1];
  std::size_t inner = 0;
  for (const auto& row : r2.rows) {
    if (row.provenance.path.size() == 2) {
      ++inner;
      EXPECT_EQ(row.provenance.path[0], (DisjunctRef{0, 1}));
      EXPECT_EQ(row.provenance.path[1].disjunction, 1u);
    }
  }
  // two equalities per separator disjunct, split into _ub and _lb
  EXPECT_EQ(inner, 8u);
  // the separator is covered by its cardinality row, so no linkage row
  EXPECT_EQ(count(flat.base, RowOrigin::kLinkage), 0u);
}

TEST(NestedFlatten, ChainLinkageAndPaths) {
  const GdpModel m = testing::nested_chain();
  for (Method method : {Method::kBigM, Method::kHull}) {
    ReformulateOptions opts;
    opts.method = method;
    const Reformulation r = reformulate(m, opts);
    EXPECT_EQ(count(r.milp, RowOrigin::kLinkage), 2u);
    EXPECT_EQ(count(r.milp, RowOrigin::kSelection), 1u);
    const LinearRow& g1 = row_named(r.milp, "g1");
    EXPECT_EQ(g1.provenance.path,
              (std::vector<DisjunctRef>{{0, 1}, {1, 0}, {2, 1}}));
    const MipSolution s = solve_mip(r.milp);
    ASSERT_EQ(s.status, SolveStatus::kOptimal);
    EXPECT_NEAR(s.objective, 11.0, 1e-7);
    EXPECT_NEAR(s.point[0], 10.0, 1e-7);
    EXPECT_NEAR(s.point[1], 1.0, 1e-7);
  }
  const testing::OracleGdp oracle = testing::enumerate_gdp(m);
  ASSERT_TRUE(oracle.feasible);
  EXPECT_NEAR(oracle.objective, 11.0, 1e-9);
  EXPECT_EQ(oracle.indicators, (std::vector<bool>{false, true, true, false, false, true}));
}

TEST(NestedFlatten, FixedFalseRemovesSubtree) {
  const GdpModel m = testing::nested_chain();
  ReformulateOptions opts;
  opts.fixed[IndicatorId{1}] = false;
  const Reformulation r = reformulate(m, opts);
  for (const auto& row : r.milp.rows) {
    EXPECT_NE(row.name, "g1");
    EXPECT_NE(row.name, "c1");
  }
  const MipSolution s = solve_mip(r.milp);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.objective, 4.0, 1e-7);
}

// Property: Big-M, hull and brute-force enumeration agree on the optimum.
TEST(ReformulateProperty, OptimaAgree) {
  for (const auto& m : testing::corpus()) {
    const testing::OracleGdp oracle = testing::enumerate_gdp(m);
    for (Method method : {Method::kBigM, Method::kHull}) {
      ReformulateOptions opts;
      opts.method = method;
      const MipSolution s = solve_mip(reformulate(m, opts).milp);
      if (!oracle.feasible) {
        EXPECT_EQ(s.status, SolveStatus::kInfeasible);
        continue;
      }
      ASSERT_EQ(s.status, SolveStatus::kOptimal);
      EXPECT_NEAR(s.objective, oracle.objective, 1e-6 * (1 + std::abs(oracle.objective)));
    }
  }
}

// Property: the hull relaxation is at least as tight as the Big-M relaxation.
TEST(ReformulateProperty, TightnessOrdering) {
  for (const auto& m : testing::corpus()) {
    const LpSolution big = solve_lp(reformulate_bigm(m).milp);
    const LpSolution hull = solve_lp(reformulate_hull(m).milp);
    if (big.status != SolveStatus::kOptimal) {
      EXPECT_EQ(hull.status, SolveStatus::kInfeasible);
      continue;
    }
    if (hull.status != SolveStatus::kOptimal) continue;
    const double tol = 1e-7 * (1 + std::abs(big.objective));
    if (m.objective().sense == Sense::kMaximize) {
      EXPECT_LE(hull.objective, big.objective + tol);
    } else {
      EXPECT_GE(hull.objective, big.objective - tol);
    }
  }
}

// Property: with a binary at 0 every copy of its disjunct is 0. Copies made
// for nested disjunctions are themselves disaggregated by the parent, so only
// top-level copies are checked.
TEST(ReformulateProperty, HullForcing) {
  for (const auto& m : testing::corpus()) {
    const Reformulation r = reformulate_hull(m);
    for (const auto& a : testing::logic_feasible_assignments(m)) {
      const LpSolution s = solve_fixed(r, a);
      if (s.status != SolveStatus::kOptimal) continue;
      for (const auto& [key, copy] : r.hull.disaggregated) {
        const auto& dis = m.disjunctions()[key.second.disjunction];
        if (dis.parent) continue;
        const auto& owner = dis.disjuncts[key.second.disjunct];
        if (!a[owner.indicator.value]) {
          EXPECT_NEAR(s.point[copy.value], 0.0, 1e-9);
        }
      }
    }
  }
}

// Property: row counts per origin follow from the model structure.
TEST(ReformulateProperty, RowCountAccounting) {
  for (const auto& m : testing::corpus()) {
    std::size_t disjunct_rows = 0;
    std::size_t bigm_rows = 0;
    std::size_t selection = 0;
    std::size_t linkage = 0;
    for (std::size_t k = 0; k < m.disjunctions().size(); ++k) {
      const auto& d = m.disjunctions()[k];
      for (const auto& dj : d.disjuncts) {
        for (const auto& c : dj.constraints) {
          ++disjunct_rows;
          bigm_rows += c.relation == Relation::kEqual ? 2 : 1;
        }
      }
      if (d.auto_select && !covering_selection(m, k)) (d.parent ? linkage : selection) += 1;
    }
    std::size_t logic = m.cardinalities().size();
    for (const auto& p : m.propositions()) logic += to_cnf(p.prop).clauses.size();

    const Reformulation big = reformulate_bigm(m);
    EXPECT_EQ(count(big.milp, RowOrigin::kDisjunct), bigm_rows);
    EXPECT_EQ(count(big.milp, RowOrigin::kGlobal), m.constraints().size());
    EXPECT_EQ(count(big.milp, RowOrigin::kSelection), selection);
    EXPECT_EQ(count(big.milp, RowOrigin::kLinkage), linkage);
    EXPECT_EQ(count(big.milp, RowOrigin::kLogic), logic);
    EXPECT_EQ(big.milp.variables.size(), m.variables().size() + m.indicators().size());

    const Reformulation hull = reformulate_hull(m);
    EXPECT_EQ(count(hull.milp, RowOrigin::kDisjunct), disjunct_rows);
    std::size_t bounds = 0;
    std::set<std::pair<VarId, std::size_t>> aggregated;
    for (const auto& [key, copy] : hull.hull.disaggregated) {
      const MilpVariable& src = hull.milp.variables[key.first.value];
      bounds += (src.upper != 0.0) + (src.lower != 0.0);
      aggregated.insert({key.first, key.second.disjunction});
    }
    EXPECT_EQ(count(hull.milp, RowOrigin::kHullBound), bounds);
    EXPECT_EQ(count(hull.milp, RowOrigin::kHullAggregation), aggregated.size());
    EXPECT_EQ(hull.milp.variables.size(),
              m.variables().size() + m.indicators().size() + hull.hull.disaggregated.size());
  }
}

// Property: pinning the binaries to a logic-feasible assignment gives the
// induced LP of that assignment.
TEST(ReformulateProperty, FeasibilityPreservation) {
  for (const auto& m : testing::corpus()) {
    const Reformulation big = reformulate_bigm(m);
    const Reformulation hull = reformulate_hull(m);
    for (const auto& a : testing::logic_feasible_assignments(m)) {
      const LpSolution induced = solve_lp(testing::induced_lp(m, a));
      for (const Reformulation* r : {&big, &hull}) {
        const LpSolution s = solve_fixed(*r, a);
        ASSERT_EQ(s.status == SolveStatus::kOptimal,
                  induced.status == SolveStatus::kOptimal);
        if (s.status == SolveStatus::kOptimal) {
          EXPECT_NEAR(s.objective, induced.objective, 1e-6 * (1 + std::abs(induced.objective)));
        }
      }
    }
  }
}

}  // namespace
}  // namespace gdpkit
