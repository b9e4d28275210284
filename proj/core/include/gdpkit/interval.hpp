#pragma once

#include <span>

#include "gdpkit/expr.hpp"

namespace gdpkit {

/// Closed interval [lo, hi]; endpoints may be infinite.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Interval&) const = default;
};

Interval operator+(Interval a, Interval b);
Interval operator*(double scale, Interval a);

/// Variable box indexed by VarId::value.
using Box = std::span<const Interval>;

/// Exact range of an affine expression over a box.
Interval range_of(const AffineExpr& expr, Box box);

/// Smallest M >= 0 with body <= rhs + M everywhere in the box, for an affine
/// `body <= rhs` constraint. Other relations and nonlinear bodies throw.
double tight_m(const Constraint& con, Box box);

}  // namespace gdpkit
