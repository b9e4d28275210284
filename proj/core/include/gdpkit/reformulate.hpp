#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gdpkit/milp_model.hpp"
#include "gdpkit/model.hpp"

namespace gdpkit {

enum class Method { kBigM, kHull };

const char* to_string(Method method);

/// Big-M values. Lookup order for a disjunct constraint: per_constraint (by
/// constraint label), per_disjunct (by indicator name), per_disjunction (by
/// disjunction name), global; when none applies M comes from interval
/// arithmetic over the variable bounds.
struct MSpec {
  std::optional<double> global;
  std::map<std::string, double> per_disjunction;
  std::map<std::string, double> per_disjunct;
  std::map<std::string, double> per_constraint;

  static MSpec auto_interval() { return {}; }
  static MSpec uniform(double m);
};

inline constexpr double kDefaultEpsilon = 1e-4;

struct ReformulateOptions {
  Method method = Method::kBigM;
  MSpec big_m;
  double epsilon = kDefaultEpsilon;
  /// Indicator fixings. true pins the binary to 1 and enforces the disjunct;
  /// false deletes the disjunct (and anything nested in it) from its
  /// disjunction and pins the binary to 0.
  std::map<IndicatorId, bool> fixed;
};

struct HullArtifacts {
  /// (source variable, disjunct) -> disaggregated copy.
  std::map<std::pair<VarId, DisjunctRef>, VarId> disaggregated;
  double epsilon = kDefaultEpsilon;
};

/// MILP variables are laid out as: the GDP variables (same ids), then one
/// binary per indicator in indicator order, then reformulation artifacts.
struct Reformulation {
  MilpModel milp;
  IndicatorMap binaries;
  HullArtifacts hull;
  std::size_t num_original = 0;
};

/// A disjunct constraint after nested disjunctions have been folded into it.
struct FlatRow {
  Constraint con;
  Provenance provenance;
  /// Label of the user constraint this row was derived from.
  std::string source_label;
};

struct FlatDisjunct {
  DisjunctRef ref;
  IndicatorId indicator;
  VarId binary;
  std::vector<FlatRow> rows;
};

struct FlatDisjunction {
  std::size_t index = 0;
  std::vector<FlatDisjunct> disjuncts;
};

/// Model with every nested disjunction already reformulated into its parent
/// disjunct. `base` holds variables (originals, binaries, inner artifacts)
/// and the rows emitted so far.
struct FlatGdp {
  MilpModel base;
  std::vector<FlatDisjunction> top_level;
  IndicatorMap binaries;
  HullArtifacts hull;
};

FlatGdp nested_flatten(const GdpModel& model, const ReformulateOptions& options);

Reformulation reformulate(const GdpModel& model,
                          const ReformulateOptions& options);
Reformulation reformulate_bigm(const GdpModel& model,
                               const MSpec& spec = MSpec::auto_interval());
Reformulation reformulate_hull(const GdpModel& model,
                               double epsilon = kDefaultEpsilon);

/// Epsilon-approximated perspective of h for the hull reformulation:
///   ((1-eps) y + eps) * h(x_i / ((1-eps) y + eps)) - eps * h(0) * (1 - y)
/// where x_i are the disaggregated copies given by `disaggregated`. The row
/// is `result <= 0` for a source constraint `h(x) <= 0`.
NlExpr perspective_epsilon(const NlExpr& h, VarId y,
                           const std::map<VarId, VarId>& disaggregated,
                           double epsilon);

}  // namespace gdpkit
