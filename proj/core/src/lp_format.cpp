#include "gdpkit/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "gdpkit/error.hpp"

namespace gdpkit {

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                              std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

namespace {

bool lp_safe_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '[' || c == ']';
}

std::string lower_case(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool reserved(std::string_view name) {
  static const std::set<std::string> words = {"inf", "infinity", "free", "end"};
  return words.count(lower_case(name)) > 0;
}

}  // namespace

std::string sanitize_name(std::string_view name) {
  std::string out;
  for (char c : name) out.push_back(lp_safe_char(c) ? c : '_');
  const bool bad_start =
      out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) ||
      out[0] == '.' ||
      ((out[0] == 'e' || out[0] == 'E') && out.size() > 1 &&
       std::isdigit(static_cast<unsigned char>(out[1])));
  if (bad_start || reserved(out)) out.insert(out.begin(), '_');
  return out;
}

// ---------------------------------------------------------------------------
// Writer

namespace {

/// Assigns unique LP-safe names, recording every change.
class NameTable {
 public:
  std::string assign(const std::string& original, std::string fallback,
                     const char* kind, std::ostringstream& header) {
    std::string base = original.empty() ? std::move(fallback)
                                        : sanitize_name(original);
    std::string name = base;
    for (int k = 2; used_.count(name); ++k) name = base + "_" + std::to_string(k);
    used_.insert(name);
    if (name != original) {
      header << "\\ rename " << kind << ' ' << quoted(original) << " -> "
             << name << '\n';
    }
    return name;
  }

 private:
  static std::string quoted(std::string_view text) {
    std::string out = "\"";
    for (char c : text) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    out.push_back('"');
    return out;
  }

  std::set<std::string> used_;
};

void write_terms(std::ostringstream& out, const AffineExpr& expr,
                 const std::vector<std::string>& names, bool with_constant) {
  bool any = false;
  for (const auto& [var, coeff] : expr.terms()) {
    out << (coeff < 0 ? " - " : " + ") << format_number(std::abs(coeff)) << ' '
        << names[var.value];
    any = true;
  }
  if (with_constant && expr.constant() != 0.0) {
    out << (expr.constant() < 0 ? " - " : " + ")
        << format_number(std::abs(expr.constant()));
    any = true;
  }
  if (!any) out << " 0";
}

}  // namespace

std::string format_lp(const MilpModel& model) {
  if (!model.nonlinear_rows.empty()) {
    throw Error(Errc::kNonlinear, "LP format cannot hold nonlinear rows");
  }
  std::ostringstream header;
  std::ostringstream body;
  NameTable var_names;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    names.push_back(var_names.assign(model.variables[j].name,
                                     "x" + std::to_string(j + 1), "var", header));
  }
  NameTable row_names;
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < model.rows.size(); ++i) {
    rows.push_back(row_names.assign(model.rows[i].name,
                                    "r" + std::to_string(i + 1), "row", header));
  }

  body << (model.sense == Sense::kMaximize ? "Maximize" : "Minimize") << '\n';
  body << " obj:";
  write_terms(body, model.objective, names, true);
  body << '\n';

  body << "Subject To\n";
  for (std::size_t i = 0; i < model.rows.size(); ++i) {
    const auto& row = model.rows[i];
    body << ' ' << rows[i] << ':';
    write_terms(body, row.expr, names, false);
    body << ' ' << (row.relation == Relation::kLessEqual      ? "<="
                    : row.relation == Relation::kGreaterEqual ? ">="
                                                              : "=")
         << ' ' << format_number(row.rhs - row.expr.constant()) << '\n';
  }

  body << "Bounds\n";
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    const auto& var = model.variables[j];
    const bool lo = std::isfinite(var.lower);
    const bool hi = std::isfinite(var.upper);
    body << ' ';
    if (!lo && !hi) {
      body << names[j] << " free";
    } else if (lo && hi && var.lower == var.upper) {
      body << names[j] << " = " << format_number(var.lower);
    } else if (lo && !hi) {
      body << names[j] << " >= " << format_number(var.lower);
    } else {
      body << format_number(var.lower) << " <= " << names[j]
           << " <= " << format_number(var.upper);
    }
    body << '\n';
  }

  bool any_binary = false;
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    if (!model.variables[j].binary) continue;
    if (!any_binary) body << "Binary\n";
    any_binary = true;
    body << ' ' << names[j] << '\n';
  }
  body << "End\n";

  return "\\ gdpkit LP export\n" + header.str() + body.str();
}

void write_lp_file(const MilpModel& model, const std::filesystem::path& path) {
  const std::string text = format_lp(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot open '" + path.string() + "'");
  out << text;
  if (!out) throw Error(Errc::kIo, "write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Section { kNone, kObjective, kConstraints, kBounds, kBinary, kEnd };

struct Term {
  double coeff;
  std::optional<std::string> name;
};

struct RawRow {
  std::string name;
  std::vector<Term> terms;
  Relation relation;
  double rhs;
};

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw Error(Errc::kParse, "line " + std::to_string(line) + ": " + message);
}

class LineLexer {
 public:
  LineLexer(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }
  bool done() {
    skip_space();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  void advance(std::size_t n = 1) { pos_ += n; }

  bool at_number() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }

  double number() {
    skip_space();
    if (match_word("inf") || match_word("infinity")) return kInf;
    double value = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto result = std::from_chars(first, last, value);
    if (result.ec != std::errc()) fail(line_, "expected a number");
    pos_ += static_cast<std::size_t>(result.ptr - first);
    return value;
  }

  std::string name() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           std::string_view("+-<>=:").find(text_[pos_]) == std::string_view::npos) {
      ++pos_;
    }
    if (pos_ == start) fail(line_, "expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  bool match_word(std::string_view word) {
    skip_space();
    if (text_.size() - pos_ < word.size()) return false;
    if (lower_case(text_.substr(pos_, word.size())) != word) return false;
    const std::size_t end = pos_ + word.size();
    if (end < text_.size() && lp_safe_char(text_[end])) return false;
    pos_ = end;
    return true;
  }

  std::optional<Relation> relop() {
    skip_space();
    auto rest = text_.substr(pos_);
    for (auto [token, rel] : {std::pair{"<=", Relation::kLessEqual},
                              std::pair{"=<", Relation::kLessEqual},
                              std::pair{">=", Relation::kGreaterEqual},
                              std::pair{"=>", Relation::kGreaterEqual},
                              std::pair{"<", Relation::kLessEqual},
                              std::pair{">", Relation::kGreaterEqual},
                              std::pair{"=", Relation::kEqual}}) {
      if (rest.substr(0, std::string_view(token).size()) == token) {
        pos_ += std::string_view(token).size();
        return rel;
      }
    }
    return std::nullopt;
  }

  /// Optional `label:` prefix.
  std::optional<std::string> label() {
    skip_space();
    const std::size_t colon = text_.find(':', pos_);
    if (colon == std::string_view::npos) return std::nullopt;
    std::string candidate(text_.substr(pos_, colon - pos_));
    while (!candidate.empty() && std::isspace(static_cast<unsigned char>(candidate.back()))) {
      candidate.pop_back();
    }
    pos_ = colon + 1;
    return candidate;
  }

  /// Signed terms up to a relational operator or end of line.
  std::vector<Term> terms() {
    std::vector<Term> out;
    while (!done()) {
      const char c = peek();
      if (c == '<' || c == '>' || c == '=') break;
      double sign = 1.0;
      while (peek() == '+' || peek() == '-') {
        if (peek() == '-') sign = -sign;
        advance();
      }
      double coeff = 1.0;
      bool has_number = false;
      if (at_number()) {
        coeff = number();
        has_number = true;
      }
      const char next = peek();
      if (done() || next == '+' || next == '-' || next == '<' || next == '>' ||
          next == '=') {
        if (!has_number) fail(line_, "dangling sign");
        out.push_back(Term{sign * coeff, std::nullopt});
        continue;
      }
      out.push_back(Term{sign * coeff, name()});
    }
    return out;
  }

  std::size_t line() const { return line_; }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::string unquote(std::string_view text, std::size_t line) {
  if (text.size() < 2 || text.front() != '"') fail(line, "malformed rename");
  std::string out;
  for (std::size_t i = 1; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size()) {
      out.push_back(text[++i]);
    } else if (text[i] == '"') {
      return out;
    } else {
      out.push_back(text[i]);
    }
  }
  fail(line, "unterminated quote");
}

}  // namespace

MilpModel parse_lp(std::string_view text) {
  MilpModel model;
  std::map<std::string, std::string> var_rename;
  std::map<std::string, std::string> row_rename;
  std::vector<Term> objective;
  std::vector<RawRow> raw_rows;
  struct RawBound {
    std::string name;
    double lower;
    double upper;
  };
  std::vector<RawBound> bounds;
  std::vector<std::string> binaries;
  std::vector<std::string> order;
  std::set<std::string> seen;
  auto note = [&](const std::string& name) {
    if (seen.insert(name).second) order.push_back(name);
  };

  Section section = Section::kNone;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }

    if (line.front() == '\\') {
      constexpr std::string_view kRename = "\\ rename ";
      if (line.substr(0, kRename.size()) == kRename) {
        std::string_view rest = line.substr(kRename.size());
        const bool is_var = rest.substr(0, 4) == "var ";
        if (!is_var && rest.substr(0, 4) != "row ") fail(line_no, "malformed rename");
        rest.remove_prefix(4);
        const std::size_t arrow = rest.rfind(" -> ");
        if (arrow == std::string_view::npos) fail(line_no, "malformed rename");
        std::string original = unquote(rest.substr(0, arrow), line_no);
        std::string renamed(rest.substr(arrow + 4));
        (is_var ? var_rename : row_rename)[renamed] = std::move(original);
      }
      if (end == text.size()) break;
      continue;
    }

    if (!std::isspace(static_cast<unsigned char>(line.front()))) {
      std::string key = lower_case(line);
      while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
      if (key == "maximize" || key == "maximise" || key == "max") {
        model.sense = Sense::kMaximize;
        section = Section::kObjective;
      } else if (key == "minimize" || key == "minimise" || key == "min") {
        model.sense = Sense::kMinimize;
        section = Section::kObjective;
      } else if (key == "subject to" || key == "such that" || key == "st" ||
                 key == "s.t.") {
        section = Section::kConstraints;
      } else if (key == "bounds" || key == "bound") {
        section = Section::kBounds;
      } else if (key == "binary" || key == "binaries" || key == "bin") {
        section = Section::kBinary;
      } else if (key == "end") {
        section = Section::kEnd;
      } else {
        fail(line_no, "unknown section '" + std::string(line) + "'");
      }
      if (end == text.size()) break;
      continue;
    }

    LineLexer lex(line, line_no);
    switch (section) {
      case Section::kNone:
      case Section::kEnd:
        fail(line_no, "content outside a section");
      case Section::kObjective: {
        lex.label();
        for (auto& term : lex.terms()) {
          if (term.name) note(*term.name);
          objective.push_back(std::move(term));
        }
        if (!lex.done()) fail(line_no, "unexpected text in objective");
        break;
      }
      case Section::kConstraints: {
        RawRow row;
        auto label = lex.label();
        if (!label) fail(line_no, "row needs a name");
        row.name = *label;
        row.terms = lex.terms();
        for (const auto& term : row.terms) {
          if (term.name) note(*term.name);
        }
        auto rel = lex.relop();
        if (!rel) fail(line_no, "expected a relational operator");
        row.relation = *rel;
        double sign = 1.0;
        if (lex.peek() == '-') {
          sign = -1.0;
          lex.advance();
        } else if (lex.peek() == '+') {
          lex.advance();
        }
        row.rhs = sign * lex.number();
        if (!lex.done()) fail(line_no, "unexpected text after right-hand side");
        raw_rows.push_back(std::move(row));
        break;
      }
      case Section::kBounds: {
        auto signed_number = [&]() {
          double sign = 1.0;
          if (lex.peek() == '-') {
            sign = -1.0;
            lex.advance();
          } else if (lex.peek() == '+') {
            lex.advance();
          }
          return sign * lex.number();
        };
        RawBound bound{"", 0.0, kInf};
        const char c = lex.peek();
        if (c == '-' || c == '+' || lex.at_number()) {
          // lo <= x [<= hi]
          bound.lower = signed_number();
          if (lex.relop() != Relation::kLessEqual) fail(line_no, "expected <=");
          bound.name = lex.name();
          if (!lex.done()) {
            if (lex.relop() != Relation::kLessEqual) fail(line_no, "expected <=");
            bound.upper = signed_number();
          }
        } else {
          bound.name = lex.name();
          if (lex.match_word("free")) {
            bound.lower = -kInf;
          } else {
            auto rel = lex.relop();
            if (!rel) fail(line_no, "expected a bound");
            const double value = signed_number();
            if (*rel == Relation::kEqual) {
              bound.lower = bound.upper = value;
            } else if (*rel == Relation::kGreaterEqual) {
              bound.lower = value;
            } else {
              bound.upper = value;
            }
          }
        }
        if (!lex.done()) fail(line_no, "unexpected text in bounds");
        bounds.push_back(std::move(bound));
        break;
      }
      case Section::kBinary: {
        while (!lex.done()) binaries.push_back(lex.name());
        break;
      }
    }
    if (end == text.size()) break;
  }
  if (section != Section::kEnd) fail(line_no, "missing End");

  // Declaration order: bounds section first, then first use, then binaries.
  std::vector<std::string> declared;
  std::set<std::string> have;
  auto declare = [&](const std::string& name) {
    if (have.insert(name).second) declared.push_back(name);
  };
  for (const auto& b : bounds) declare(b.name);
  for (const auto& name : order) declare(name);
  for (const auto& name : binaries) declare(name);

  std::map<std::string, VarId> ids;
  for (const auto& name : declared) {
    auto it = var_rename.find(name);
    ids[name] = model.add_variable(it == var_rename.end() ? name : it->second,
                                   0.0, kInf);
  }
  for (const auto& name : binaries) {
    auto& var = model.variables[ids[name].value];
    var.binary = true;
    var.upper = 1.0;
  }
  for (const auto& b : bounds) {
    auto& var = model.variables[ids[b.name].value];
    var.lower = b.lower;
    var.upper = b.upper;
  }
  for (const auto& term : objective) {
    if (term.name) {
      model.objective.add_term(ids[*term.name], term.coeff);
    } else {
      model.objective.add_constant(term.coeff);
    }
  }
  for (auto& raw : raw_rows) {
    AffineExpr expr;
    for (const auto& term : raw.terms) {
      if (term.name) {
        expr.add_term(ids[*term.name], term.coeff);
      } else {
        expr.add_constant(term.coeff);
      }
    }
    auto it = row_rename.find(raw.name);
    model.add_row(it == row_rename.end() ? raw.name : it->second,
                  std::move(expr), raw.relation, raw.rhs,
                  Provenance{RowOrigin::kGlobal, {}});
  }
  return model;
}

MilpModel read_lp_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_lp(buffer.str());
}

}  // namespace gdpkit
