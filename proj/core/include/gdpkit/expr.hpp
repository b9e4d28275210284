#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gdpkit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Opaque index of a decision variable inside its owning model.
struct VarId {
  std::uint32_t value = 0;

  auto operator<=>(const VarId&) const = default;
};

enum class VarKind { kContinuous, kBinary };

struct Variable {
  VarId id;
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarKind kind = VarKind::kContinuous;

  bool operator==(const Variable&) const = default;
};

/// Sparse assignment of values to variables.
using Point = std::map<VarId, double>;

/// Affine function sum(coeff * var) + constant in canonical form: terms are
/// ordered by variable id and exact zero coefficients are never stored.
class AffineExpr {
 public:
  AffineExpr() = default;
  explicit AffineExpr(double constant) : constant_(constant) {}

  static AffineExpr term(VarId var, double coeff = 1.0);

  void add_term(VarId var, double coeff);
  void add_constant(double value) { constant_ += value; }

  double coefficient(VarId var) const;
  const std::map<VarId, double>& terms() const { return terms_; }
  double constant() const { return constant_; }
  bool is_constant() const { return terms_.empty(); }

  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator-=(const AffineExpr& other);
  AffineExpr& operator*=(double scale);

  friend AffineExpr operator+(AffineExpr lhs, const AffineExpr& rhs) {
    return lhs += rhs;
  }
  friend AffineExpr operator-(AffineExpr lhs, const AffineExpr& rhs) {
    return lhs -= rhs;
  }
  friend AffineExpr operator*(AffineExpr lhs, double scale) {
    return lhs *= scale;
  }
  friend AffineExpr operator*(double scale, AffineExpr rhs) {
    return rhs *= scale;
  }
  AffineExpr operator-() const { return *this * -1.0; }

  bool operator==(const AffineExpr&) const = default;

 private:
  std::map<VarId, double> terms_;
  double constant_ = 0.0;
};

/// Immutable factorable expression tree: polynomials plus the
/// scale-substitution node used to build perspective functions. Copies share
/// structure.
class NlExpr {
 public:
  enum class Kind { kConstant, kVariable, kSum, kProduct, kPower, kScaled };

  NlExpr() : NlExpr(constant(0.0)) {}

  static NlExpr constant(double value);
  static NlExpr variable(VarId var);
  static NlExpr sum(std::vector<NlExpr> children);
  static NlExpr product(std::vector<NlExpr> children);
  static NlExpr power(NlExpr base, int exponent);
  /// child(x) with every variable v read as v / divisor(x).
  static NlExpr scaled(NlExpr child, AffineExpr divisor);
  static NlExpr from_affine(const AffineExpr& expr);

  Kind kind() const;
  double value() const;
  VarId var() const;
  std::span<const NlExpr> children() const;
  int exponent() const;
  const AffineExpr& divisor() const;

  /// Structural equality.
  bool operator==(const NlExpr& other) const;

 private:
  struct Node;
  explicit NlExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

using Expr = std::variant<AffineExpr, NlExpr>;

enum class Linearity { kAffine, kNonlinear };

double evaluate(const AffineExpr& expr, const Point& point);
double evaluate(const AffineExpr& expr, std::span<const double> point);
double evaluate(const NlExpr& expr, const Point& point);
double evaluate(const NlExpr& expr, std::span<const double> point);
double evaluate(const Expr& expr, const Point& point);
double evaluate(const Expr& expr, std::span<const double> point);

/// Returns expr with every variable v replaced by v / divisor.
NlExpr substitute_scaled(const NlExpr& expr, const AffineExpr& divisor);

Linearity linearity_of(const AffineExpr& expr);
Linearity linearity_of(const NlExpr& expr);
Linearity linearity_of(const Expr& expr);

/// Affine form of an expression classified as affine, nullopt otherwise.
std::optional<AffineExpr> to_affine(const NlExpr& expr);

/// Renames variables; ids absent from `mapping` are kept.
NlExpr rename_variables(const NlExpr& expr,
                        const std::map<VarId, VarId>& mapping);

std::set<VarId> variables_of(const AffineExpr& expr);
std::set<VarId> variables_of(const NlExpr& expr);
std::set<VarId> variables_of(const Expr& expr);

enum class Relation { kLessEqual, kGreaterEqual, kEqual };

const char* to_string(Relation relation);

struct Constraint {
  Expr body;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
  std::string label;

  bool is_affine() const { return std::holds_alternative<AffineExpr>(body); }
  const AffineExpr& affine() const { return std::get<AffineExpr>(body); }

  bool operator==(const Constraint&) const = default;
};

/// Whether `value` satisfies `lhs relation rhs` with absolute tolerance.
bool satisfies(double lhs, Relation relation, double rhs, double tol);

}  // namespace gdpkit
