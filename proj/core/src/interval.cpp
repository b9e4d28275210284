#include "gdpkit/interval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gdpkit/error.hpp"

namespace gdpkit {

namespace {

// inf - inf never arises here: lo sums only -inf/finite terms and hi sums
// only +inf/finite terms.
double mul(double scale, double bound) {
  if (scale == 0.0) return 0.0;
  return scale * bound;
}

}  // namespace

Interval operator+(Interval a, Interval b) {
  return Interval{a.lo + b.lo, a.hi + b.hi};
}

Interval operator*(double scale, Interval a) {
  if (scale >= 0.0) return Interval{mul(scale, a.lo), mul(scale, a.hi)};
  return Interval{mul(scale, a.hi), mul(scale, a.lo)};
}

Interval range_of(const AffineExpr& expr, Box box) {
  Interval total{expr.constant(), expr.constant()};
  for (const auto& [var, coeff] : expr.terms()) {
    if (var.value >= box.size()) {
      throw Error(Errc::kMissingVariable, "variable id " +
                                              std::to_string(var.value) +
                                              " has no interval in the box");
    }
    total = total + coeff * box[var.value];
  }
  return total;
}

double tight_m(const Constraint& con, Box box) {
  if (!con.is_affine()) {
    throw Error(Errc::kNonlinear, "constraint '" + con.label +
                                      "' is nonlinear; supply an explicit M");
  }
  if (con.relation != Relation::kLessEqual) {
    throw Error(Errc::kInvalidArgument,
                "tight_m expects a <= constraint; rewrite '" + con.label +
                    "' first");
  }
  const Interval range = range_of(con.affine(), box);
  return std::max(0.0, range.hi - con.rhs);
}

}  // namespace gdpkit
