#include "model_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "gdpkit/error.hpp"

namespace gdpkit::tools {

std::string format_real(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

/// Text with its position in the file, for error messages.
struct Span {
  std::string_view text;
  std::size_t line = 0;
  std::size_t column = 1;
};

[[noreturn]] void fail(std::size_t line, std::size_t column,
                       const std::string& message) {
  throw Error(Errc::kParse, "line " + std::to_string(line) + ", column " +
                                std::to_string(column) + ": " + message);
}

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

Span trim(Span s) {
  while (!s.text.empty() && std::isspace(static_cast<unsigned char>(s.text.front()))) {
    s.text.remove_prefix(1);
    ++s.column;
  }
  while (!s.text.empty() && std::isspace(static_cast<unsigned char>(s.text.back()))) {
    s.text.remove_suffix(1);
  }
  return s;
}

Span sub(const Span& s, std::size_t pos, std::size_t n = std::string_view::npos) {
  return Span{s.text.substr(pos, n), s.line, s.column + pos};
}

/// Splits an optional leading `label:`.
std::pair<std::string, Span> split_label(Span s) {
  s = trim(s);
  std::size_t i = 0;
  if (i < s.text.size() && ident_start(s.text[i])) {
    while (i < s.text.size() && ident_char(s.text[i])) ++i;
    std::size_t j = i;
    while (j < s.text.size() && (s.text[j] == ' ' || s.text[j] == '\t')) ++j;
    if (j < s.text.size() && s.text[j] == ':') {
      return {std::string(s.text.substr(0, i)), trim(sub(s, j + 1))};
    }
  }
  return {std::string(), s};
}

template <class F>
void wrap(std::size_t line, std::size_t column, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() == Errc::kParse) throw;
    throw Error(e.code(), "line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Tokens shared by the expression and proposition grammars.

struct Token {
  enum class Kind { kNumber, kIdent, kSymbol, kEnd };
  Kind kind = Kind::kEnd;
  std::string_view text;
  double number = 0.0;
  std::size_t column = 0;
};

class Lexer {
 public:
  explicit Lexer(Span span) : span_(span) { next(); }

  const Token& peek() const { return current_; }
  Token take() {
    Token t = current_;
    next();
    return t;
  }
  bool accept_symbol(char c) {
    if (current_.kind == Token::Kind::kSymbol && current_.text[0] == c) {
      next();
      return true;
    }
    return false;
  }
  bool accept_word(std::string_view word) {
    if (current_.kind == Token::Kind::kIdent && current_.text == word) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void error(const std::string& message) const {
    fail(span_.line, current_.column, message);
  }

 private:
  void next() {
    const auto& text = span_.text;
    while (pos_ < text.size() && std::isspace(static_cast<unsigned char>(text[pos_]))) ++pos_;
    current_ = Token{};
    current_.column = span_.column + pos_;
    if (pos_ >= text.size()) return;
    const char c = text[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      auto result = std::from_chars(text.data() + pos_, text.data() + text.size(),
                                    current_.number);
      if (result.ec != std::errc()) fail(span_.line, current_.column, "malformed number");
      const std::size_t len = static_cast<std::size_t>(result.ptr - (text.data() + pos_));
      current_.kind = Token::Kind::kNumber;
      current_.text = text.substr(pos_, len);
      pos_ += len;
    } else if (ident_start(c)) {
      std::size_t end = pos_;
      while (end < text.size() && ident_char(text[end])) ++end;
      current_.kind = Token::Kind::kIdent;
      current_.text = text.substr(pos_, end - pos_);
      pos_ = end;
    } else if (std::string_view("+-*^(),").find(c) != std::string_view::npos) {
      current_.kind = Token::Kind::kSymbol;
      current_.text = text.substr(pos_, 1);
      ++pos_;
    } else {
      fail(span_.line, current_.column, std::string("unexpected character '") + c + "'");
    }
  }

  Span span_;
  std::size_t pos_ = 0;
  Token current_;
};

// ---------------------------------------------------------------------------
// Expressions

NlExpr negate(const NlExpr& e) {
  if (e.kind() == NlExpr::Kind::kConstant) return NlExpr::constant(-e.value());
  return NlExpr::product({NlExpr::constant(-1.0), e});
}

class ExprParser {
 public:
  ExprParser(Span span, const GdpModel& model) : lex_(span), model_(model) {}

  NlExpr parse_all() {
    if (lex_.peek().kind == Token::Kind::kEnd) lex_.error("expected an expression");
    NlExpr e = sum();
    if (lex_.peek().kind != Token::Kind::kEnd) lex_.error("unexpected token");
    return e;
  }

 private:
  NlExpr sum() {
    std::vector<NlExpr> parts{product()};
    while (true) {
      if (lex_.accept_symbol('+')) {
        parts.push_back(product());
      } else if (lex_.accept_symbol('-')) {
        parts.push_back(negate(product()));
      } else {
        break;
      }
    }
    return parts.size() == 1 ? parts[0] : NlExpr::sum(std::move(parts));
  }

  NlExpr product() {
    std::vector<NlExpr> parts{unary()};
    while (lex_.accept_symbol('*')) parts.push_back(unary());
    return parts.size() == 1 ? parts[0] : NlExpr::product(std::move(parts));
  }

  NlExpr unary() {
    if (lex_.accept_symbol('-')) return negate(unary());
    return power();
  }

  NlExpr power() {
    NlExpr base = primary();
    if (!lex_.accept_symbol('^')) return base;
    const bool negative = lex_.accept_symbol('-');
    const Token t = lex_.peek();
    if (t.kind != Token::Kind::kNumber || t.number != std::floor(t.number) ||
        std::abs(t.number) > 64) {
      lex_.error("exponent must be a small integer");
    }
    lex_.take();
    const int k = static_cast<int>(t.number);
    return NlExpr::power(std::move(base), negative ? -k : k);
  }

  NlExpr primary() {
    const Token t = lex_.peek();
    if (t.kind == Token::Kind::kNumber) {
      lex_.take();
      return NlExpr::constant(t.number);
    }
    if (t.kind == Token::Kind::kIdent) {
      auto var = model_.find_variable(std::string(t.text));
      if (!var) lex_.error("undeclared variable '" + std::string(t.text) + "'");
      lex_.take();
      return NlExpr::variable(*var);
    }
    if (lex_.accept_symbol('(')) {
      NlExpr inner = sum();
      if (!lex_.accept_symbol(')')) lex_.error("expected ')'");
      return inner;
    }
    lex_.error("expected a number, variable or '('");
  }

  Lexer lex_;
  const GdpModel& model_;
};

Expr classify(const NlExpr& e) {
  if (auto affine = to_affine(e)) return *affine;
  return e;
}

Expr parse_expr_span(Span span, const GdpModel& model) {
  return classify(ExprParser(span, model).parse_all());
}

Constraint parse_constraint(Span span, const GdpModel& model) {
  auto [label, rest] = split_label(span);
  const auto& text = rest.text;
  std::size_t pos = std::string_view::npos;
  std::size_t len = 0;
  Relation relation = Relation::kLessEqual;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '<' || c == '>' || c == '=') {
      pos = i;
      const bool two = i + 1 < text.size() && text[i + 1] == '=';
      len = two ? 2 : 1;
      if (c == '<') {
        relation = Relation::kLessEqual;
      } else if (c == '>') {
        relation = Relation::kGreaterEqual;
      } else {
        relation = Relation::kEqual;
      }
      if (c != '=' && !two) fail(rest.line, rest.column + i, "expected '<=' or '>='");
      break;
    }
  }
  if (pos == std::string_view::npos) {
    fail(rest.line, rest.column, "constraint needs a relational operator");
  }
  const NlExpr lhs = ExprParser(sub(rest, 0, pos), model).parse_all();
  const NlExpr rhs = ExprParser(sub(rest, pos + len), model).parse_all();

  Constraint con;
  con.label = label;
  con.relation = relation;
  auto la = to_affine(lhs);
  auto ra = to_affine(rhs);
  if (la && ra) {
    AffineExpr body = *la - *ra;
    con.rhs = -body.constant();
    body.add_constant(-body.constant());
    con.body = std::move(body);
  } else if (rhs.kind() == NlExpr::Kind::kConstant) {
    con.body = lhs;
    con.rhs = rhs.value();
  } else {
    con.body = NlExpr::sum({lhs, negate(rhs)});
    con.rhs = 0.0;
  }
  return con;
}

// ---------------------------------------------------------------------------
// Propositions

class PropParser {
 public:
  PropParser(Span span, const GdpModel& model) : lex_(span), model_(model) {}

  Proposition parse_all() {
    Proposition p = iff();
    if (lex_.peek().kind != Token::Kind::kEnd) lex_.error("unexpected token");
    return p;
  }

 private:
  Proposition iff() {
    Proposition p = implies();
    while (lex_.accept_word("iff")) p = Proposition::iff(p, implies());
    return p;
  }
  Proposition implies() {
    Proposition p = any();
    if (lex_.accept_word("implies")) return Proposition::implies(p, implies());
    return p;
  }
  Proposition any() {
    std::vector<Proposition> parts{all()};
    while (lex_.accept_word("or")) parts.push_back(all());
    return parts.size() == 1 ? parts[0] : Proposition::any_of(std::move(parts));
  }
  Proposition all() {
    std::vector<Proposition> parts{negation()};
    while (lex_.accept_word("and")) parts.push_back(negation());
    return parts.size() == 1 ? parts[0] : Proposition::all_of(std::move(parts));
  }
  Proposition negation() {
    if (lex_.accept_word("not")) {
      if (lex_.peek().kind == Token::Kind::kIdent && !keyword(lex_.peek().text)) {
        return Proposition::literal(indicator(), true);
      }
      return Proposition::negation(negation());
    }
    if (lex_.accept_symbol('(')) {
      Proposition inner = iff();
      if (!lex_.accept_symbol(')')) lex_.error("expected ')'");
      return inner;
    }
    return Proposition::literal(indicator());
  }

  static bool keyword(std::string_view w) {
    return w == "not" || w == "and" || w == "or" || w == "implies" || w == "iff";
  }

  IndicatorId indicator() {
    const Token t = lex_.peek();
    if (t.kind != Token::Kind::kIdent || keyword(t.text)) {
      lex_.error("expected an indicator name");
    }
    auto id = model_.find_indicator(std::string(t.text));
    if (!id) lex_.error("undeclared indicator '" + std::string(t.text) + "'");
    lex_.take();
    return *id;
  }

  Lexer lex_;
  const GdpModel& model_;
};

Cardinality parse_cardinality(Span span, const GdpModel& model) {
  Lexer lex(span);
  Cardinality card;
  if (lex.accept_word("exactly")) {
    card.mode = CardinalityMode::kExactly;
  } else if (lex.accept_word("atleast")) {
    card.mode = CardinalityMode::kAtLeast;
  } else if (lex.accept_word("atmost")) {
    card.mode = CardinalityMode::kAtMost;
  } else {
    lex.error("expected exactly, atleast or atmost");
  }
  auto indicator = [&]() {
    const Token t = lex.peek();
    if (t.kind != Token::Kind::kIdent) lex.error("expected an indicator name");
    auto id = model.find_indicator(std::string(t.text));
    if (!id) lex.error("undeclared indicator '" + std::string(t.text) + "'");
    lex.take();
    return *id;
  };
  const Token count = lex.peek();
  if (count.kind == Token::Kind::kNumber) {
    if (count.number != std::floor(count.number) || count.number < 0) {
      lex.error("count must be a nonnegative integer");
    }
    card.count = static_cast<int>(count.number);
    lex.take();
  } else {
    card.count = indicator();
  }
  if (!lex.accept_word("of")) lex.error("expected 'of'");
  card.indicators.push_back(indicator());
  while (lex.accept_symbol(',')) card.indicators.push_back(indicator());
  if (lex.peek().kind != Token::Kind::kEnd) lex.error("unexpected token");
  return card;
}

// ---------------------------------------------------------------------------
// Sections

struct Line {
  Span span;
  bool indented = false;
};

struct Section {
  std::string kind;
  std::string arg;
  std::size_t line = 0;
  std::vector<Line> lines;
};

std::vector<Section> split_sections(std::string_view text) {
  std::vector<Section> sections;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    Span span = trim(Span{raw, line_no, 1});
    if (span.text.empty()) continue;
    if (span.text.front() == '[') {
      if (span.text.back() != ']') fail(line_no, span.column, "unterminated section header");
      Span inner = trim(sub(span, 1, span.text.size() - 2));
      Section s;
      s.line = line_no;
      const auto space = inner.text.find_first_of(" \t");
      s.kind = std::string(inner.text.substr(0, space));
      if (space != std::string_view::npos) {
        s.arg = std::string(trim(sub(inner, space)).text);
      }
      static const std::vector<std::string> known = {
          "variables", "constraints", "disjunction", "propositions", "cardinality",
          "objective"};
      if (std::find(known.begin(), known.end(), s.kind) == known.end()) {
        fail(line_no, inner.column, "unknown section '" + s.kind + "'");
      }
      if ((s.kind == "disjunction") == s.arg.empty()) {
        fail(line_no, inner.column,
             s.kind == "disjunction" ? "disjunction needs a name"
                                     : "section '" + s.kind + "' takes no argument");
      }
      sections.push_back(std::move(s));
      continue;
    }
    if (sections.empty()) fail(line_no, span.column, "content before the first section");
    sections.back().lines.push_back(Line{span, span.column > 1});
  }
  return sections;
}

double parse_bound(std::string_view word, std::size_t line, std::size_t column) {
  if (word == "inf" || word == "+inf") return kInf;
  if (word == "-inf") return -kInf;
  double value = 0.0;
  const char* first = word.data();
  if (!word.empty() && word.front() == '+') ++first;
  auto result = std::from_chars(first, word.data() + word.size(), value);
  if (result.ec != std::errc() || result.ptr != word.data() + word.size()) {
    fail(line, column, "malformed bound '" + std::string(word) + "'");
  }
  return value;
}

std::vector<Span> words(Span s) {
  std::vector<Span> out;
  std::size_t i = 0;
  while (i < s.text.size()) {
    while (i < s.text.size() && std::isspace(static_cast<unsigned char>(s.text[i]))) ++i;
    if (i >= s.text.size()) break;
    std::size_t j = i;
    while (j < s.text.size() && !std::isspace(static_cast<unsigned char>(s.text[j]))) ++j;
    out.push_back(sub(s, i, j - i));
    i = j;
  }
  return out;
}

void read_variables(const Section& section, GdpModel& model) {
  for (const auto& line : section.lines) {
    auto w = words(line.span);
    const std::size_t ln = line.span.line;
    if (w.size() == 2 && w[1].text == "binary") {
      wrap(ln, w[0].column, [&] {
        model.add_variable(std::string(w[0].text), 0.0, 1.0, VarKind::kBinary);
      });
      continue;
    }
    if (w.size() != 3) fail(ln, line.span.column, "expected 'name lo hi' or 'name binary'");
    if (!ident_start(w[0].text[0])) fail(ln, w[0].column, "malformed variable name");
    const double lo = parse_bound(w[1].text, ln, w[1].column);
    const double hi = parse_bound(w[2].text, ln, w[2].column);
    wrap(ln, w[0].column,
         [&] { model.add_variable(std::string(w[0].text), lo, hi); });
  }
}

struct PendingDisjunction {
  const Section* section;
  std::optional<std::pair<std::string, std::size_t>> parent;
  Span parent_span;
  bool auto_select = true;
  std::vector<std::pair<std::string, std::vector<Span>>> disjuncts;
};

PendingDisjunction read_disjunction_header(const Section& section) {
  PendingDisjunction d;
  d.section = &section;
  for (const auto& line : section.lines) {
    const Span s = line.span;
    if (s.text.substr(0, 9) == "disjunct " || s.text == "disjunct:") {
      if (s.text.back() != ':') fail(s.line, s.column, "disjunct header must end with ':'");
      Span name = trim(sub(s, 8, s.text.size() - 9));
      if (!name.text.empty()) {
        for (char c : name.text) {
          if (!ident_char(c)) fail(s.line, name.column, "malformed indicator name");
        }
      }
      d.disjuncts.emplace_back(std::string(name.text), std::vector<Span>{});
      continue;
    }
    if (!d.disjuncts.empty()) {
      d.disjuncts.back().second.push_back(s);
      continue;
    }
    auto [key, rest] = split_label(s);
    if (key == "parent") {
      const auto slash = rest.text.rfind('/');
      if (slash == std::string_view::npos) fail(s.line, rest.column, "expected OUTER/k");
      std::size_t k = 0;
      auto digits = rest.text.substr(slash + 1);
      auto result = std::from_chars(digits.data(), digits.data() + digits.size(), k);
      if (result.ec != std::errc() || result.ptr != digits.data() + digits.size() || k == 0) {
        fail(s.line, rest.column + slash + 1, "disjunct index must be a positive integer");
      }
      d.parent = std::pair{std::string(trim(sub(rest, 0, slash)).text), k};
      d.parent_span = rest;
    } else if (key == "select") {
      if (rest.text == "auto") {
        d.auto_select = true;
      } else if (rest.text == "none") {
        d.auto_select = false;
      } else {
        fail(s.line, rest.column, "select must be 'auto' or 'none'");
      }
    } else {
      fail(s.line, s.column,
           key.empty() ? "expected a key or disjunct header" : "unknown key '" + key + "'");
    }
  }
  return d;
}

}  // namespace

GdpModel parse_model(std::string_view text) {
  const auto sections = split_sections(text);
  GdpModel model;

  for (const auto& s : sections) {
    if (s.kind == "variables") read_variables(s, model);
  }
  for (const auto& s : sections) {
    if (s.kind != "constraints") continue;
    for (const auto& line : s.lines) {
      Constraint con = parse_constraint(line.span, model);
      wrap(line.span.line, line.span.column,
           [&] { model.add_constraint(std::move(con)); });
    }
  }

  std::vector<PendingDisjunction> pending;
  for (const auto& s : sections) {
    if (s.kind == "disjunction") pending.push_back(read_disjunction_header(s));
  }
  // Parents first; file order otherwise.
  while (!pending.empty()) {
    bool progress = false;
    for (auto it = pending.begin(); it != pending.end();) {
      std::optional<DisjunctRef> parent;
      if (it->parent) {
        auto outer = model.find_disjunction(it->parent->first);
        if (!outer) {
          ++it;
          continue;
        }
        parent = DisjunctRef{*outer, it->parent->second - 1};
      }
      std::vector<DisjunctSpec> specs;
      for (const auto& [name, lines] : it->disjuncts) {
        DisjunctSpec spec;
        spec.indicator_name = name;
        for (const auto& line : lines) spec.constraints.push_back(parse_constraint(line, model));
        specs.push_back(std::move(spec));
      }
      const Section& section = *it->section;
      wrap(section.line, 1, [&] {
        model.add_disjunction(section.arg, std::move(specs), parent);
        if (!it->auto_select) model.set_auto_select(model.disjunctions().size() - 1, false);
      });
      it = pending.erase(it);
      progress = true;
    }
    if (!progress) {
      const auto& d = pending.front();
      fail(d.parent_span.line, d.parent_span.column,
           "undeclared parent disjunction '" + d.parent->first + "'");
    }
  }

  for (const auto& s : sections) {
    if (s.kind == "propositions") {
      for (const auto& line : s.lines) {
        auto [label, rest] = split_label(line.span);
        Proposition prop = PropParser(rest, model).parse_all();
        wrap(line.span.line, line.span.column,
             [&] { model.add_proposition(std::move(prop), label); });
      }
    } else if (s.kind == "cardinality") {
      for (const auto& line : s.lines) {
        auto [label, rest] = split_label(line.span);
        Cardinality card = parse_cardinality(rest, model);
        wrap(line.span.line, line.span.column,
             [&] { model.choose(std::move(card), label); });
      }
    }
  }

  bool have_objective = false;
  for (const auto& s : sections) {
    if (s.kind != "objective") continue;
    for (const auto& line : s.lines) {
      if (have_objective) fail(line.span.line, line.span.column, "second objective");
      auto w = words(line.span);
      Sense sense;
      if (w[0].text == "maximize") {
        sense = Sense::kMaximize;
      } else if (w[0].text == "minimize") {
        sense = Sense::kMinimize;
      } else {
        fail(line.span.line, line.span.column, "expected maximize or minimize");
      }
      Span rest = trim(sub(line.span, w[0].text.size()));
      Expr expr = parse_expr_span(rest, model);
      wrap(line.span.line, line.span.column,
           [&] { model.set_objective(sense, std::move(expr)); });
      have_objective = true;
    }
  }
  return model;
}

GdpModel read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

Expr parse_expression(std::string_view text, const GdpModel& model) {
  return parse_expr_span(Span{text, 1, 1}, model);
}

// ---------------------------------------------------------------------------
// Emission

namespace {

std::string format_affine(const AffineExpr& expr, const GdpModel& model) {
  std::string out;
  for (const auto& [var, coeff] : expr.terms()) {
    const std::string& name = model.variable(var).name;
    const double mag = std::abs(coeff);
    if (out.empty()) {
      if (coeff < 0) out += "-";
    } else {
      out += coeff < 0 ? " - " : " + ";
    }
    if (mag != 1.0) out += format_real(mag) + " * ";
    out += name;
  }
  const double c = expr.constant();
  if (out.empty()) return format_real(c);
  if (c != 0.0) out += (c < 0 ? " - " : " + ") + format_real(std::abs(c));
  return out;
}

std::string format_nl(const NlExpr& e, const GdpModel& model) {
  switch (e.kind()) {
    case NlExpr::Kind::kConstant:
      return e.value() < 0 || std::signbit(e.value())
                 ? "(" + format_real(e.value()) + ")"
                 : format_real(e.value());
    case NlExpr::Kind::kVariable:
      return model.variable(e.var()).name;
    case NlExpr::Kind::kSum:
    case NlExpr::Kind::kProduct: {
      const char* op = e.kind() == NlExpr::Kind::kSum ? " + " : " * ";
      std::string out = "(";
      bool first = true;
      for (const auto& child : e.children()) {
        if (!first) out += op;
        out += format_nl(child, model);
        first = false;
      }
      return out + ")";
    }
    case NlExpr::Kind::kPower:
      return "(" + format_nl(e.children()[0], model) + " ^ " +
             std::to_string(e.exponent()) + ")";
    case NlExpr::Kind::kScaled:
      break;
  }
  throw Error(Errc::kInvalidArgument,
              "scale-substituted expressions have no model-file form");
}

std::string format_prop(const Proposition& p, const GdpModel& model) {
  using K = Proposition::Kind;
  switch (p.kind()) {
    case K::kLiteral: {
      const Literal lit = p.lit();
      return (lit.negated ? "not " : "") + model.indicator(lit.indicator).name;
    }
    case K::kNot: {
      const Proposition& child = p.children()[0];
      const std::string inner = format_prop(child, model);
      return "not " + (child.kind() == K::kLiteral ? "(" + inner + ")" : inner);
    }
    default: {
      const char* op = p.kind() == K::kAnd       ? " and "
                       : p.kind() == K::kOr      ? " or "
                       : p.kind() == K::kImplies ? " implies "
                                                 : " iff ";
      std::string out = "(";
      bool first = true;
      for (const auto& child : p.children()) {
        if (!first) out += op;
        out += format_prop(child, model);
        first = false;
      }
      return out + ")";
    }
  }
}

const char* relop(Relation r) {
  return r == Relation::kLessEqual ? "<=" : r == Relation::kGreaterEqual ? ">=" : "==";
}

std::string format_constraint(const Constraint& con, const GdpModel& model) {
  std::string out;
  if (!con.label.empty()) out = con.label + ": ";
  return out + format_expression(con.body, model) + " " + relop(con.relation) +
         " " + format_real(con.rhs);
}

}  // namespace

std::string format_expression(const Expr& expr, const GdpModel& model) {
  if (const auto* affine = std::get_if<AffineExpr>(&expr)) {
    return format_affine(*affine, model);
  }
  return format_nl(std::get<NlExpr>(expr), model);
}

std::string emit_model(const GdpModel& model) {
  std::ostringstream out;
  out << "[variables]\n";
  for (const auto& v : model.variables()) {
    out << v.name;
    if (v.kind == VarKind::kBinary) {
      out << " binary\n";
    } else {
      out << ' ' << format_real(v.lower) << ' ' << format_real(v.upper) << '\n';
    }
  }
  if (!model.constraints().empty()) {
    out << "\n[constraints]\n";
    for (const auto& con : model.constraints()) {
      out << format_constraint(con, model) << '\n';
    }
  }
  const auto& all = model.disjunctions();
  for (const auto& d : all) {
    out << "\n[disjunction " << d.name << "]\n";
    if (d.parent) {
      out << "parent: " << all[d.parent->disjunction].name << '/'
          << d.parent->disjunct + 1 << '\n';
    }
    if (!d.auto_select) out << "select: none\n";
    for (const auto& disjunct : d.disjuncts) {
      out << "disjunct " << model.indicator(disjunct.indicator).name << ":\n";
      for (const auto& con : disjunct.constraints) {
        out << "  " << format_constraint(con, model) << '\n';
      }
    }
  }
  if (!model.propositions().empty()) {
    out << "\n[propositions]\n";
    for (const auto& p : model.propositions()) {
      out << p.label << ": " << format_prop(p.prop, model) << '\n';
    }
  }
  if (!model.cardinalities().empty()) {
    out << "\n[cardinality]\n";
    for (const auto& c : model.cardinalities()) {
      out << c.label << ": " << to_string(c.card.mode) << ' ';
      if (const int* n = std::get_if<int>(&c.card.count)) {
        out << *n;
      } else {
        out << model.indicator(std::get<IndicatorId>(c.card.count)).name;
      }
      out << " of ";
      for (std::size_t i = 0; i < c.card.indicators.size(); ++i) {
        if (i) out << ", ";
        out << model.indicator(c.card.indicators[i]).name;
      }
      out << '\n';
    }
  }
  out << "\n[objective]\n"
      << (model.objective().sense == Sense::kMaximize ? "maximize " : "minimize ")
      << format_expression(model.objective().expr, model) << '\n';
  return out.str();
}

}  // namespace gdpkit::tools
