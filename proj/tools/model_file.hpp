#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gdpkit/model.hpp"

namespace gdpkit::tools {

/// Reads the sectioned model format:
///
///   [variables]         name lo hi | name binary
///   [constraints]       label: expr relop expr
///   [disjunction NAME]  parent: OUTER/k, select: auto|none, disjunct IND:
///                       followed by indented constraint lines
///   [propositions]      label: not/and/or/implies/iff over indicator names
///   [cardinality]       label: exactly|atleast|atmost N|IND of A, B, ...
///   [objective]         maximize|minimize expr
///
/// `#` starts a comment. Errors carry "line L, column C". Nested disjunctions
/// may appear before or after their parent.
GdpModel parse_model(std::string_view text);
GdpModel read_model_file(const std::filesystem::path& path);

/// Canonical text of `model`; parse_model(emit_model(m)) reproduces m for any
/// model obtained from parse_model.
std::string emit_model(const GdpModel& model);

/// Infix expression over the model's variables (+ - * ^ and parentheses).
/// Affine results come back as AffineExpr.
Expr parse_expression(std::string_view text, const GdpModel& model);
std::string format_expression(const Expr& expr, const GdpModel& model);

/// Shortest round-trip decimal.
std::string format_real(double value);

}  // namespace gdpkit::tools
