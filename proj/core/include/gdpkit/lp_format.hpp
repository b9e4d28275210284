#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gdpkit/milp_model.hpp"

namespace gdpkit {

/// LP text format: `Maximize|Minimize`, `Subject To`, `Bounds`, `Binary`,
/// `End`. Section headers start in column 0, content lines are indented,
/// one row per line as ` name: expr relop rhs`. Numbers are printed with 17
/// significant digits. Every variable gets a bounds line, in declaration
/// order. Names that are not LP-safe are rewritten and the mapping is kept in
/// `\ rename` comment lines so that parse_lp restores the originals.
std::string format_lp(const MilpModel& model);

/// Throws Errc::kNonlinear for models with nonlinear rows, Errc::kIo on I/O
/// failure.
void write_lp_file(const MilpModel& model, const std::filesystem::path& path);

/// Parses text produced by format_lp (and simple hand-written LP files).
/// Row provenance is not stored in the format; parsed rows are kGlobal.
MilpModel parse_lp(std::string_view text);
MilpModel read_lp_file(const std::filesystem::path& path);

/// LP-safe identifier for `name` (empty input yields "_").
std::string sanitize_name(std::string_view name);

/// `%.17g`-style rendering; parses back to the identical double.
std::string format_number(double value);

}  // namespace gdpkit
