#include <gtest/gtest.h>

#include <cmath>

#include "gdpkit/error.hpp"
#include "gdpkit/expr.hpp"
#include "support/oracles.hpp"

namespace gdpkit {
namespace {

using testing::Rng;
using testing::uniform;
using testing::uniform_int;

const VarId x1{0};
const VarId x2{1};

TEST(Evaluate, AffineAtPoint) {
  AffineExpr e = AffineExpr::term(x1, 2.0) + AffineExpr::term(x2, 3.0);
  e.add_constant(-1.0);
  EXPECT_EQ(evaluate(e, Point{{x1, 1.0}, {x2, 1.0}}), 4.0);
}

TEST(Evaluate, EmptyExpressionIsZero) {
  EXPECT_EQ(evaluate(AffineExpr{}, Point{}), 0.0);
  EXPECT_EQ(evaluate(AffineExpr{}, Point{{x1, 7.0}}), 0.0);
}

TEST(Evaluate, SquareMinusFour) {
  const NlExpr e = NlExpr::sum({NlExpr::power(NlExpr::variable(x1), 2),
                                NlExpr::constant(-4.0)});
  EXPECT_EQ(evaluate(e, Point{{x1, 3.0}}), 5.0);
}

TEST(Evaluate, MissingVariableNamesTheId) {
  const AffineExpr e = AffineExpr::term(VarId{7});
  try {
    evaluate(e, Point{{x1, 1.0}});
    FAIL() << "expected an error";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::kMissingVariable);
    EXPECT_NE(std::string(err.what()).find('7'), std::string::npos);
  }
}

TEST(Evaluate, ZeroDivisorIsNonfinite) {
  const NlExpr e = substitute_scaled(NlExpr::variable(x1), AffineExpr::term(x2));
  try {
    evaluate(e, Point{{x1, 1.0}, {x2, 0.0}});
    FAIL() << "expected an error";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::kNonfinite);
  }
}

TEST(AffineExpr, DropsExactZeros) {
  AffineExpr e = AffineExpr::term(x1, 2.0);
  e.add_term(x1, -2.0);
  EXPECT_TRUE(e.terms().empty());
  AffineExpr tiny = AffineExpr::term(x2, 1e-300);
  EXPECT_EQ(tiny.terms().size(), 1u);
}

TEST(SubstituteScaled, SquareOverDivisor) {
  const VarId s{1};
  const NlExpr e = substitute_scaled(NlExpr::power(NlExpr::variable(x1), 2),
                                     AffineExpr::term(s));
  EXPECT_EQ(evaluate(e, Point{{x1, 4.0}, {s, 2.0}}), 4.0);
}

TEST(SubstituteScaled, IdentityDivisor) {
  const VarId s{1};
  const NlExpr e = substitute_scaled(NlExpr::variable(x1), AffineExpr::term(s));
  EXPECT_EQ(evaluate(e, Point{{x1, 3.0}, {s, 1.0}}), 3.0);
}

TEST(SubstituteScaled, ShiftedSquare) {
  const VarId s{1};
  const NlExpr h = NlExpr::sum({NlExpr::power(NlExpr::variable(x1), 2),
                                NlExpr::constant(-4.0)});
  const NlExpr e = substitute_scaled(h, AffineExpr::term(s));
  const double oracle = (2.0 / 0.5) * (2.0 / 0.5) - 4.0;
  EXPECT_NEAR(evaluate(e, Point{{x1, 2.0}, {s, 0.5}}), oracle, 1e-12);
}

TEST(Linearity, Classification) {
  AffineExpr two_x = AffineExpr::term(x1, 2.0);
  two_x.add_constant(1.0);
  EXPECT_EQ(linearity_of(two_x), Linearity::kAffine);
  EXPECT_EQ(linearity_of(NlExpr::power(NlExpr::variable(x1), 2)), Linearity::kNonlinear);
  EXPECT_EQ(linearity_of(NlExpr::sum({NlExpr::variable(x1), NlExpr::constant(3)})),
            Linearity::kAffine);
}

TEST(Linearity, ToAffineMatchesStructure) {
  const NlExpr e = NlExpr::sum(
      {NlExpr::product({NlExpr::constant(2), NlExpr::variable(x1)}),
       NlExpr::variable(x2), NlExpr::constant(-1)});
  auto a = to_affine(e);
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(a->coefficient(x1), 2.0);
  EXPECT_EQ(a->coefficient(x2), 1.0);
  EXPECT_EQ(a->constant(), -1.0);
  EXPECT_FALSE(to_affine(NlExpr::product({NlExpr::variable(x1), NlExpr::variable(x2)})));
}

TEST(Constraint, EqualityAsInequalityPair) {
  Rng rng(11);
  const Constraint eq{AffineExpr::term(x1) + AffineExpr::term(x2), Relation::kEqual, 3.0, "e"};
  for (int i = 0; i < 200; ++i) {
    const double a = uniform_int(rng, 0, 3);
    const double b = uniform_int(rng, 0, 3);
    const double lhs = evaluate(eq.body, Point{{x1, a}, {x2, b}});
    const bool pair = satisfies(lhs, Relation::kLessEqual, 3.0, 0.0) &&
                      satisfies(lhs, Relation::kGreaterEqual, 3.0, 0.0);
    EXPECT_EQ(satisfies(lhs, Relation::kEqual, 3.0, 0.0), pair);
  }
}

// Property: affine evaluation agrees with a naive term-by-term sum.
TEST(EvaluateProperty, AffineMatchesNaiveSum) {
  Rng rng(1001);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = uniform_int(rng, 1, 8);
    AffineExpr e;
    std::vector<double> coeff(static_cast<std::size_t>(n), 0.0);
    Point p;
    for (int j = 0; j < n; ++j) {
      const VarId v{static_cast<std::uint32_t>(j)};
      coeff[static_cast<std::size_t>(j)] = uniform(rng, -100, 100);
      e.add_term(v, coeff[static_cast<std::size_t>(j)]);
      p[v] = uniform(rng, -50, 50);
    }
    const double c = uniform(rng, -10, 10);
    e.add_constant(c);
    double naive = c;
    double magnitude = std::abs(c);
    for (int j = 0; j < n; ++j) {
      const double term = coeff[static_cast<std::size_t>(j)] * p[VarId{static_cast<std::uint32_t>(j)}];
      naive += term;
      magnitude += std::abs(term);
    }
    EXPECT_NEAR(evaluate(e, p), naive, 1e-12 * (1.0 + magnitude));
  }
}

NlExpr random_polynomial(Rng& rng, int n, int depth) {
  if (depth == 0 || uniform_int(rng, 0, 2) == 0) {
    if (uniform_int(rng, 0, 1) == 0) return NlExpr::constant(uniform_int(rng, -3, 3));
    return NlExpr::variable(VarId{static_cast<std::uint32_t>(uniform_int(rng, 0, n - 1))});
  }
  switch (uniform_int(rng, 0, 2)) {
    case 0:
      return NlExpr::sum({random_polynomial(rng, n, depth - 1),
                          random_polynomial(rng, n, depth - 1)});
    case 1:
      return NlExpr::product({random_polynomial(rng, n, depth - 1),
                              random_polynomial(rng, n, depth - 1)});
    default:
      return NlExpr::power(random_polynomial(rng, n, depth - 1), uniform_int(rng, 1, 3));
  }
}

// Property: h(x / s) evaluated through the scaled node equals h at x / s.
TEST(SubstituteScaledProperty, MatchesScaledPoint) {
  Rng rng(1002);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = uniform_int(rng, 1, 3);
    const NlExpr h = random_polynomial(rng, n, 3);
    const VarId s{static_cast<std::uint32_t>(n)};
    const NlExpr scaled = substitute_scaled(h, AffineExpr::term(s));
    const double sv = uniform(rng, 0.1, 3.0);
    Point p{{s, sv}};
    Point q;
    for (int j = 0; j < n; ++j) {
      const VarId v{static_cast<std::uint32_t>(j)};
      p[v] = uniform(rng, -2, 2);
      q[v] = p[v] / sv;
    }
    const double expected = evaluate(h, q);
    EXPECT_NEAR(evaluate(scaled, p), expected, 1e-9 * (1.0 + std::abs(expected)));
  }
}

TEST(NlExpr, RenameVariables) {
  const NlExpr e = NlExpr::product({NlExpr::variable(x1), NlExpr::variable(x2)});
  const NlExpr r = rename_variables(e, {{x1, VarId{5}}});
  EXPECT_EQ(variables_of(r), (std::set<VarId>{x2, VarId{5}}));
}

}  // namespace
}  // namespace gdpkit
