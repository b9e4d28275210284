#include "gdpkit/expr.hpp"

#include <cmath>
#include <functional>
#include <utility>

#include "gdpkit/error.hpp"

namespace gdpkit {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::kMissingVariable: return "missing-variable";
    case Errc::kNonfinite: return "nonfinite";
    case Errc::kInvalidArgument: return "invalid-argument";
    case Errc::kBoundOrder: return "bound-order";
    case Errc::kDuplicateName: return "duplicate-name";
    case Errc::kUndeclared: return "undeclared";
    case Errc::kUnmappedIndicator: return "unmapped-indicator";
    case Errc::kNonlinear: return "nonlinear";
    case Errc::kMissingBigM: return "missing-big-m";
    case Errc::kValidation: return "validation";
    case Errc::kUnboundedVariable: return "unbounded-variable";
    case Errc::kIo: return "io";
    case Errc::kParse: return "parse";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// AffineExpr

AffineExpr AffineExpr::term(VarId var, double coeff) {
  AffineExpr expr;
  expr.add_term(var, coeff);
  return expr;
}

void AffineExpr::add_term(VarId var, double coeff) {
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(var, coeff);
  if (inserted) return;
  it->second += coeff;
  if (it->second == 0.0) terms_.erase(it);
}

double AffineExpr::coefficient(VarId var) const {
  auto it = terms_.find(var);
  return it == terms_.end() ? 0.0 : it->second;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  for (const auto& [var, coeff] : other.terms_) add_term(var, coeff);
  constant_ += other.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) {
  for (const auto& [var, coeff] : other.terms_) add_term(var, -coeff);
  constant_ -= other.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator*=(double scale) {
  if (scale == 0.0) {
    terms_.clear();
  } else {
    for (auto& entry : terms_) entry.second *= scale;
  }
  constant_ *= scale;
  return *this;
}

// ---------------------------------------------------------------------------
// NlExpr

struct NlExpr::Node {
  Kind kind = Kind::kConstant;
  double value = 0.0;
  VarId var;
  std::vector<NlExpr> children;
  int exponent = 0;
  AffineExpr divisor;
};

NlExpr NlExpr::constant(double value) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kConstant;
  node->value = value;
  return NlExpr(std::move(node));
}

NlExpr NlExpr::variable(VarId var) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kVariable;
  node->var = var;
  return NlExpr(std::move(node));
}

NlExpr NlExpr::sum(std::vector<NlExpr> children) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kSum;
  node->children = std::move(children);
  return NlExpr(std::move(node));
}

NlExpr NlExpr::product(std::vector<NlExpr> children) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kProduct;
  node->children = std::move(children);
  return NlExpr(std::move(node));
}

NlExpr NlExpr::power(NlExpr base, int exponent) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kPower;
  node->children.push_back(std::move(base));
  node->exponent = exponent;
  return NlExpr(std::move(node));
}

NlExpr NlExpr::scaled(NlExpr child, AffineExpr divisor) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kScaled;
  node->children.push_back(std::move(child));
  node->divisor = std::move(divisor);
  return NlExpr(std::move(node));
}

NlExpr NlExpr::from_affine(const AffineExpr& expr) {
  std::vector<NlExpr> parts;
  for (const auto& [var, coeff] : expr.terms()) {
    if (coeff == 1.0) {
      parts.push_back(variable(var));
    } else {
      parts.push_back(product({constant(coeff), variable(var)}));
    }
  }
  if (expr.constant() != 0.0 || parts.empty()) {
    parts.push_back(constant(expr.constant()));
  }
  if (parts.size() == 1) return parts.front();
  return sum(std::move(parts));
}

NlExpr::Kind NlExpr::kind() const { return node_->kind; }
double NlExpr::value() const { return node_->value; }
VarId NlExpr::var() const { return node_->var; }
std::span<const NlExpr> NlExpr::children() const { return node_->children; }
int NlExpr::exponent() const { return node_->exponent; }
const AffineExpr& NlExpr::divisor() const { return node_->divisor; }

bool NlExpr::operator==(const NlExpr& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::kConstant: return a.value == b.value;
    case Kind::kVariable: return a.var == b.var;
    case Kind::kPower:
      if (a.exponent != b.exponent) return false;
      break;
    case Kind::kScaled:
      if (!(a.divisor == b.divisor)) return false;
      break;
    default: break;
  }
  return a.children == b.children;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

using Lookup = std::function<double(VarId)>;

double checked(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw Error(Errc::kNonfinite, std::string("nonfinite result in ") + what);
  }
  return value;
}

double eval_affine(const AffineExpr& expr, const Lookup& lookup) {
  double total = expr.constant();
  for (const auto& [var, coeff] : expr.terms()) total += coeff * lookup(var);
  return total;
}

double eval_node(const NlExpr& expr, const Lookup& lookup) {
  switch (expr.kind()) {
    case NlExpr::Kind::kConstant: return expr.value();
    case NlExpr::Kind::kVariable: return lookup(expr.var());
    case NlExpr::Kind::kSum: {
      double total = 0.0;
      for (const auto& child : expr.children()) total += eval_node(child, lookup);
      return total;
    }
    case NlExpr::Kind::kProduct: {
      double total = 1.0;
      for (const auto& child : expr.children()) total *= eval_node(child, lookup);
      return total;
    }
    case NlExpr::Kind::kPower: {
      const double base = eval_node(expr.children()[0], lookup);
      return checked(std::pow(base, expr.exponent()), "power");
    }
    case NlExpr::Kind::kScaled: {
      const double divisor = eval_affine(expr.divisor(), lookup);
      if (divisor == 0.0 || !std::isfinite(divisor)) {
        throw Error(Errc::kNonfinite,
                    "scale-substituted divisor evaluates to zero");
      }
      const Lookup scaled = [&](VarId var) { return lookup(var) / divisor; };
      return eval_node(expr.children()[0], scaled);
    }
  }
  return 0.0;
}

[[noreturn]] void throw_missing(VarId var) {
  throw Error(Errc::kMissingVariable,
              "variable id " + std::to_string(var.value) + " is not assigned");
}

Lookup sparse_lookup(const Point& point) {
  return [&point](VarId var) {
    auto it = point.find(var);
    if (it == point.end()) throw_missing(var);
    return it->second;
  };
}

Lookup dense_lookup(std::span<const double> point) {
  return [point](VarId var) {
    if (var.value >= point.size()) throw_missing(var);
    return point[var.value];
  };
}

}  // namespace

double evaluate(const AffineExpr& expr, const Point& point) {
  return eval_affine(expr, sparse_lookup(point));
}

double evaluate(const AffineExpr& expr, std::span<const double> point) {
  double total = expr.constant();
  for (const auto& [var, coeff] : expr.terms()) {
    if (var.value >= point.size()) throw_missing(var);
    total += coeff * point[var.value];
  }
  return total;
}

double evaluate(const NlExpr& expr, const Point& point) {
  return checked(eval_node(expr, sparse_lookup(point)), "expression");
}

double evaluate(const NlExpr& expr, std::span<const double> point) {
  return checked(eval_node(expr, dense_lookup(point)), "expression");
}

double evaluate(const Expr& expr, const Point& point) {
  return std::visit([&](const auto& e) { return evaluate(e, point); }, expr);
}

double evaluate(const Expr& expr, std::span<const double> point) {
  return std::visit([&](const auto& e) { return evaluate(e, point); }, expr);
}

NlExpr substitute_scaled(const NlExpr& expr, const AffineExpr& divisor) {
  return NlExpr::scaled(expr, divisor);
}

// ---------------------------------------------------------------------------
// Classification and rewriting

std::optional<AffineExpr> to_affine(const NlExpr& expr) {
  switch (expr.kind()) {
    case NlExpr::Kind::kConstant: return AffineExpr(expr.value());
    case NlExpr::Kind::kVariable: return AffineExpr::term(expr.var());
    case NlExpr::Kind::kSum: {
      AffineExpr total;
      for (const auto& child : expr.children()) {
        auto part = to_affine(child);
        if (!part) return std::nullopt;
        total += *part;
      }
      return total;
    }
    case NlExpr::Kind::kProduct: {
      double scale = 1.0;
      std::optional<AffineExpr> linear;
      for (const auto& child : expr.children()) {
        auto part = to_affine(child);
        if (!part) return std::nullopt;
        if (part->is_constant()) {
          scale *= part->constant();
        } else if (linear) {
          return std::nullopt;
        } else {
          linear = std::move(part);
        }
      }
      if (!linear) return AffineExpr(scale);
      return *linear * scale;
    }
    case NlExpr::Kind::kPower: {
      if (expr.exponent() == 0) return AffineExpr(1.0);
      auto base = to_affine(expr.children()[0]);
      if (!base) return std::nullopt;
      if (expr.exponent() == 1) return base;
      if (!base->is_constant()) return std::nullopt;
      const double value = std::pow(base->constant(), expr.exponent());
      if (!std::isfinite(value)) return std::nullopt;
      return AffineExpr(value);
    }
    case NlExpr::Kind::kScaled: {
      auto child = to_affine(expr.children()[0]);
      if (!child) return std::nullopt;
      if (child->is_constant()) return child;
      const AffineExpr& divisor = expr.divisor();
      if (!divisor.is_constant() || divisor.constant() == 0.0) {
        return std::nullopt;
      }
      AffineExpr result(child->constant());
      for (const auto& [var, coeff] : child->terms()) {
        result.add_term(var, coeff / divisor.constant());
      }
      return result;
    }
  }
  return std::nullopt;
}

Linearity linearity_of(const AffineExpr&) { return Linearity::kAffine; }

Linearity linearity_of(const NlExpr& expr) {
  return to_affine(expr) ? Linearity::kAffine : Linearity::kNonlinear;
}

Linearity linearity_of(const Expr& expr) {
  return std::visit([](const auto& e) { return linearity_of(e); }, expr);
}

namespace {

AffineExpr rename_affine(const AffineExpr& expr,
                         const std::map<VarId, VarId>& mapping) {
  AffineExpr result(expr.constant());
  for (const auto& [var, coeff] : expr.terms()) {
    auto it = mapping.find(var);
    result.add_term(it == mapping.end() ? var : it->second, coeff);
  }
  return result;
}

}  // namespace

NlExpr rename_variables(const NlExpr& expr,
                        const std::map<VarId, VarId>& mapping) {
  auto rename_children = [&] {
    std::vector<NlExpr> out;
    out.reserve(expr.children().size());
    for (const auto& child : expr.children()) {
      out.push_back(rename_variables(child, mapping));
    }
    return out;
  };
  switch (expr.kind()) {
    case NlExpr::Kind::kConstant: return expr;
    case NlExpr::Kind::kVariable: {
      auto it = mapping.find(expr.var());
      return it == mapping.end() ? expr : NlExpr::variable(it->second);
    }
    case NlExpr::Kind::kSum: return NlExpr::sum(rename_children());
    case NlExpr::Kind::kProduct: return NlExpr::product(rename_children());
    case NlExpr::Kind::kPower:
      return NlExpr::power(rename_variables(expr.children()[0], mapping),
                           expr.exponent());
    case NlExpr::Kind::kScaled:
      return NlExpr::scaled(rename_variables(expr.children()[0], mapping),
                            rename_affine(expr.divisor(), mapping));
  }
  return expr;
}

std::set<VarId> variables_of(const AffineExpr& expr) {
  std::set<VarId> out;
  for (const auto& entry : expr.terms()) out.insert(entry.first);
  return out;
}

namespace {

void collect(const NlExpr& expr, std::set<VarId>& out) {
  if (expr.kind() == NlExpr::Kind::kVariable) out.insert(expr.var());
  if (expr.kind() == NlExpr::Kind::kScaled) {
    for (const auto& entry : expr.divisor().terms()) out.insert(entry.first);
  }
  for (const auto& child : expr.children()) collect(child, out);
}

}  // namespace

std::set<VarId> variables_of(const NlExpr& expr) {
  std::set<VarId> out;
  collect(expr, out);
  return out;
}

std::set<VarId> variables_of(const Expr& expr) {
  return std::visit([](const auto& e) { return variables_of(e); }, expr);
}

const char* to_string(Relation relation) {
  switch (relation) {
    case Relation::kLessEqual: return "<=";
    case Relation::kGreaterEqual: return ">=";
    case Relation::kEqual: return "=";
  }
  return "?";
}

bool satisfies(double lhs, Relation relation, double rhs, double tol) {
  switch (relation) {
    case Relation::kLessEqual: return lhs <= rhs + tol;
    case Relation::kGreaterEqual: return lhs >= rhs - tol;
    case Relation::kEqual: return std::abs(lhs - rhs) <= tol;
  }
  return false;
}

}  // namespace gdpkit
