#include "arise/dsl/parser.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <string>

namespace arise::dsl {

namespace {

constexpr std::size_t kMaxParseDiagnostics = 50;

// Thrown inside the parser to unwind to statement-level recovery.
struct Abort {};

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::newline: return "end of line";
    case TokenKind::indent: return "indentation";
    case TokenKind::dedent: return "end of block";
    case TokenKind::eof: return "end of file";
    default: return "'" + t.text + "'";
  }
}

std::string unquote(std::string_view raw) {
  std::string out;
  if (raw.size() < 2) return out;
  raw = raw.substr(1, raw.size() - 2);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 1 < raw.size()) {
      char n = raw[i + 1];
      if (n == '\\' || n == '"' || n == '\'') {
        out.push_back(n);
        ++i;
        continue;
      }
    }
    out.push_back(raw[i]);
  }
  return out;
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

  std::vector<Statement> statements() {
    std::vector<Statement> out;
    while (!at(TokenKind::eof)) {
      if (at(TokenKind::newline)) {
        ++pos_;
        continue;
      }
      try {
        out.push_back(statement());
      } catch (const Abort&) {
        recover();
      }
      if (diags_.size() >= kMaxParseDiagnostics) break;
    }
    return out;
  }

  std::vector<Diagnostic>& diagnostics() { return diags_; }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    auto i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at(TokenKind k) const { return peek().kind == k; }
  bool at_kw(std::string_view kw) const { return peek().is_keyword(kw); }
  bool at_op(std::string_view op) const { return peek().is_op(op); }

  const Token& advance() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    if (t.kind == TokenKind::indent) ++depth_;
    if (t.kind == TokenKind::dedent) --depth_;
    return t;
  }

  [[noreturn]] void fail(std::string code, std::string message, SourceSpan span) {
    diags_.push_back(compile_error(std::move(code), std::move(message), span));
    throw Abort{};
  }

  [[noreturn]] void unexpected(std::string_view expected) {
    const Token& t = peek();
    if (t.kind == TokenKind::indent)
      fail("parse.bad_indent", "unexpected indentation", t.span);
    fail("parse.unexpected_token",
         "expected " + std::string(expected) + ", found " + describe(t), t.span);
  }

  const Token& expect_op(std::string_view op) {
    if (!at_op(op)) unexpected("'" + std::string(op) + "'");
    return advance();
  }
  const Token& expect_kw(std::string_view kw) {
    if (!at_kw(kw)) unexpected("'" + std::string(kw) + "'");
    return advance();
  }
  const Token& expect_ident(std::string_view what) {
    if (!at(TokenKind::identifier)) unexpected(what);
    return advance();
  }

  void end_of_statement() {
    if (at(TokenKind::newline)) {
      advance();
      return;
    }
    if (at(TokenKind::eof) || at(TokenKind::dedent)) return;
    unexpected("end of line");
  }

  void recover() {
    // Skip to the end of the offending top-level statement, including any
    // block it opened.
    while (!at(TokenKind::eof)) {
      const Token& t = advance();
      if (depth_ <= 0 && (t.kind == TokenKind::newline || t.kind == TokenKind::dedent)) break;
    }
    depth_ = 0;
  }

  static SourceSpan cover(SourceSpan from, SourceSpan to) {
    if (to.line != from.line) return {from.line, from.column, from.length};
    return {from.line, from.column, to.column + to.length - from.column};
  }

  SourceSpan prev_span() const { return toks_[pos_ == 0 ? 0 : pos_ - 1].span; }

  Statement statement() {
    const Token& t = peek();
    if (t.kind == TokenKind::indent) fail("parse.bad_indent", "unexpected indentation", t.span);
    if (t.is_keyword("model")) return model_decl();
    if (t.is_keyword("param")) return param_decl();
    if (t.is_keyword("behavior")) return behavior_def();
    if (t.is_keyword("require")) return require_stmt();
    if (t.kind == TokenKind::identifier) return object_def();
    unexpected("a statement");
  }

  ModelDecl model_decl() {
    SourceSpan start = advance().span;
    ModelDecl m;
    if (!at(TokenKind::identifier)) unexpected("a model name");
    m.name = advance().text;
    while (at_op(".")) {
      advance();
      if (!at(TokenKind::identifier) && !at(TokenKind::keyword)) unexpected("a model name component");
      m.name += "." + advance().text;
    }
    m.loc.span = cover(start, prev_span());
    end_of_statement();
    return m;
  }

  ParamDecl param_decl() {
    SourceSpan start = advance().span;
    ParamDecl p;
    p.name = expect_ident("a parameter name").text;
    expect_op("=");
    p.value = value();
    p.loc.span = cover(start, prev_span());
    end_of_statement();
    return p;
  }

  Value value() {
    Value v;
    const Token& t = peek();
    v.loc.span = t.span;
    if (t.is_op("-") || t.is_op("+")) {
      bool neg = t.is_op("-");
      advance();
      if (!at(TokenKind::number)) unexpected("a number");
      const Token& n = advance();
      v.data = (neg ? -1.0 : 1.0) * number_of(n);
      v.loc.span = cover(t.span, n.span);
      return v;
    }
    switch (t.kind) {
      case TokenKind::number: v.data = number_of(advance()); return v;
      case TokenKind::string: v.data = unquote(advance().text); return v;
      case TokenKind::identifier: v.data = Name{advance().text}; return v;
      case TokenKind::keyword:
        if (t.text == "true" || t.text == "false") {
          v.data = advance().text == "true";
          return v;
        }
        if (t.text == "left" || t.text == "right") {
          v.data = advance().text == "left" ? Direction::left : Direction::right;
          return v;
        }
        break;
      default: break;
    }
    unexpected("a value");
  }

  double number_of(const Token& t) {
    double d = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), d);
    if (ec != std::errc{} || p != t.text.data() + t.text.size())
      fail("parse.bad_number", "malformed number '" + t.text + "'", t.span);
    return d;
  }

  std::vector<Value> arg_list() {
    std::vector<Value> args;
    expect_op("(");
    if (!at_op(")")) {
      args.push_back(value());
      while (at_op(",")) {
        advance();
        args.push_back(value());
      }
    }
    expect_op(")");
    return args;
  }

  void open_block() {
    expect_op(":");
    if (!at(TokenKind::newline)) unexpected("end of line after ':'");
    advance();
    if (!at(TokenKind::indent))
      fail("parse.bad_indent", "expected an indented block", peek().span);
    advance();
  }

  BehaviorDef behavior_def() {
    SourceSpan start = advance().span;
    BehaviorDef b;
    b.name = expect_ident("a behavior name").text;
    expect_op("(");
    if (!at_op(")")) {
      b.params.push_back(behavior_param());
      while (at_op(",")) {
        advance();
        b.params.push_back(behavior_param());
      }
    }
    expect_op(")");
    b.loc.span = cover(start, prev_span());
    open_block();
    int block = depth_;
    while (depth_ >= block && !at(TokenKind::eof)) {
      if (at(TokenKind::dedent)) {
        advance();
        break;
      }
      if (at(TokenKind::newline)) {
        advance();
        continue;
      }
      if (at_kw("do")) {
        b.actions.push_back(action());
        end_of_statement();
      } else if (at_kw("interrupt")) {
        b.interrupts.push_back(interrupt());
      } else {
        unexpected("'do' or 'interrupt'");
      }
    }
    if (b.actions.empty() && b.interrupts.empty())
      fail("parse.empty_behavior", "behavior '" + b.name + "' has an empty body", b.loc.span);
    return b;
  }

  BehaviorParam behavior_param() {
    BehaviorParam p;
    p.name = expect_ident("a parameter name").text;
    if (at_op(":")) {
      advance();
      const Token& t = expect_ident("a parameter type");
      auto type = param_type_from(t.text);
      if (!type) fail("parse.unknown_type", "unknown parameter type '" + t.text + "'", t.span);
      p.type = *type;
    }
    return p;
  }

  Action action() {
    SourceSpan start = advance().span;  // do
    const Token& name = expect_ident("an action name");
    auto kind = action_kind_from(name.text);
    if (!kind) fail("parse.unknown_action", "unknown action '" + name.text + "'", name.span);
    Action a;
    a.kind = *kind;
    a.args = arg_list();
    a.loc.span = cover(start, prev_span());
    return a;
  }

  Interrupt interrupt() {
    SourceSpan start = advance().span;
    expect_kw("when");
    Interrupt in;
    in.when = condition();
    in.loc.span = cover(start, prev_span());
    open_block();
    int block = depth_;
    while (depth_ >= block && !at(TokenKind::eof)) {
      if (at(TokenKind::dedent)) {
        advance();
        break;
      }
      if (at(TokenKind::newline)) {
        advance();
        continue;
      }
      if (!at_kw("do")) unexpected("'do'");
      in.actions.push_back(action());
      end_of_statement();
    }
    if (in.actions.empty())
      fail("parse.empty_behavior", "interrupt has no actions", in.loc.span);
    return in;
  }

  Condition condition() {
    Condition c;
    c.terms.push_back(comparison());
    while (at_kw("and")) {
      advance();
      c.terms.push_back(comparison());
    }
    return c;
  }

  Comparison comparison() {
    Comparison cmp;
    SourceSpan start = peek().span;
    cmp.lhs = operand();
    const Token& op = peek();
    static constexpr std::pair<std::string_view, CmpOp> kOps[] = {
        {"<", CmpOp::lt}, {"<=", CmpOp::le}, {">", CmpOp::gt},
        {">=", CmpOp::ge}, {"==", CmpOp::eq}, {"!=", CmpOp::ne}};
    bool found = false;
    for (const auto& [text, kind] : kOps) {
      if (op.is_op(text)) {
        cmp.op = kind;
        found = true;
      }
    }
    if (!found) unexpected("a comparison operator");
    advance();
    cmp.rhs = operand();
    cmp.loc.span = cover(start, prev_span());
    return cmp;
  }

  Operand operand() {
    Operand o;
    const Token& t = peek();
    o.loc.span = t.span;
    if (t.kind == TokenKind::identifier && peek(1).is_op("(") &&
        (t.text == "distance" || t.text == "signal")) {
      bool is_distance = t.text == "distance";
      advance();
      advance();
      if (is_distance) {
        o.kind = Operand::Kind::distance;
        o.object = expect_ident("an object name").text;
        expect_op(",");
        o.other = expect_ident("an object name").text;
      } else {
        o.kind = Operand::Kind::signal;
        if (!at(TokenKind::number)) unexpected("a signal index");
        o.value.loc.span = peek().span;
        o.value.data = number_of(advance());
      }
      expect_op(")");
      o.loc.span = cover(t.span, prev_span());
      return o;
    }
    if (t.kind == TokenKind::identifier && peek(1).is_op(".")) {
      o.object = advance().text;
      advance();
      const Token& prop = expect_ident("'speed' or 'lane'");
      if (prop.text == "speed") {
        o.kind = Operand::Kind::speed;
      } else if (prop.text == "lane") {
        o.kind = Operand::Kind::lane;
      } else {
        fail("parse.unknown_property", "unknown property '" + prop.text + "'", prop.span);
      }
      o.loc.span = cover(t.span, prop.span);
      return o;
    }
    o.kind = Operand::Kind::value;
    o.value = value();
    return o;
  }

  RequireStmt require_stmt() {
    SourceSpan start = advance().span;
    RequireStmt r;
    r.condition = condition();
    r.loc.span = cover(start, prev_span());
    end_of_statement();
    return r;
  }

  ObjectDef object_def() {
    const Token& name = advance();
    ObjectDef o;
    o.name = name.text;
    expect_op("=");
    expect_kw("new");
    const Token& kind_tok = expect_ident("an object class");
    auto kind = object_kind_from(kind_tok.text);
    if (!kind) fail("parse.unknown_kind", "unknown object class '" + kind_tok.text + "'", kind_tok.span);
    o.kind = *kind;
    o.placement = placement();
    if (at_kw("facing")) {
      advance();
      o.placement.heading = value();
    }
    while (at_kw("with")) {
      advance();
      if (at_kw("behavior")) {
        SourceSpan bstart = advance().span;
        if (o.behavior)
          fail("parse.unexpected_token", "object '" + o.name + "' already has a behavior", bstart);
        BehaviorCall call;
        call.name = expect_ident("a behavior name").text;
        call.args = at_op("(") ? arg_list() : std::vector<Value>{};
        call.loc.span = cover(bstart, prev_span());
        o.behavior = std::move(call);
      } else {
        Attribute attr;
        attr.name = expect_ident("an attribute name").text;
        attr.value = value();
        o.attributes.push_back(std::move(attr));
      }
    }
    o.loc.span = cover(name.span, prev_span());
    end_of_statement();
    return o;
  }

  PlacementExpr placement() {
    PlacementExpr p;
    p.loc.span = peek().span;
    if (at_kw("on")) {
      advance();
      const Token& lane = expect_ident("'lane'");
      if (lane.text != "lane") unexpected("'lane'");
      p.anchor = Anchor::on_lane;
      expect_op("(");
      p.lane = value();
      expect_op(")");
    } else if (at_kw("at")) {
      advance();
      p.anchor = Anchor::absolute_point;
      expect_op("(");
      Value x = value();
      expect_op(",");
      Value y = value();
      expect_op(")");
      p.point = std::array<Value, 2>{std::move(x), std::move(y)};
    } else if (at_kw("ahead") || at_kw("behind") || at_kw("left") || at_kw("right")) {
      const Token& rel = advance();
      p.anchor = Anchor::relative;
      if (rel.text == "behind") {
        p.relation = Relation::behind;
      } else {
        expect_kw("of");
        p.relation = rel.text == "ahead" ? Relation::ahead_of
                     : rel.text == "left" ? Relation::left_of
                                          : Relation::right_of;
      }
      p.reference = expect_ident("a reference object").text;
      if (at_kw("by")) {
        advance();
        p.distance = value();
      }
    } else {
      p.anchor = Anchor::on_lane;  // anywhere on the road network
    }
    p.loc.span = cover(p.loc.span, prev_span());
    return p;
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  std::vector<Diagnostic> diags_;
};

void assign_regions(ScriptModule& m, const std::vector<RegionMarker>& markers,
                    std::vector<Diagnostic>& diags) {
  std::vector<std::string> seen;
  for (const auto& mk : markers) {
    if (!is_region_label(mk.label)) {
      diags.push_back(compile_error("parse.unknown_region", "unknown region label '" + mk.label + "'", mk.span));
    } else if (std::find(seen.begin(), seen.end(), mk.label) != seen.end()) {
      diags.push_back(compile_error("parse.duplicate_region", "region '" + mk.label + "' appears twice", mk.span));
    }
    seen.push_back(mk.label);
  }
  if (!diags.empty()) return;

  std::size_t n = m.statements.size();
  std::size_t first_marked = n;
  if (!markers.empty()) {
    first_marked = 0;
    while (first_marked < n && span_of(m.statements[first_marked]).line < markers.front().span.line)
      ++first_marked;
  }
  if (first_marked > 0 || markers.empty()) {
    if (std::find(seen.begin(), seen.end(), "defaults") != seen.end()) {
      diags.push_back(compile_error("parse.duplicate_region",
                                    "statements before the first region marker fall into 'defaults', "
                                    "which is also declared explicitly",
                                    span_of(m.statements.front())));
      return;
    }
    m.regions.push_back({"defaults", 0, first_marked});
  }
  std::size_t idx = first_marked;
  for (std::size_t k = 0; k < markers.size(); ++k) {
    std::size_t begin = idx;
    int next_line = k + 1 < markers.size() ? markers[k + 1].span.line : std::numeric_limits<int>::max();
    while (idx < n && span_of(m.statements[idx]).line < next_line) ++idx;
    m.regions.push_back({markers[k].label, begin, idx});
  }
}

}  // namespace

ParseResult parse(const LexResult& lexed) {
  ParseResult result;
  if (!lexed.ok()) {
    result.diagnostics = lexed.diagnostics;
    return result;
  }
  if (lexed.tokens.empty()) {
    result.diagnostics.push_back(compile_error("parse.unexpected_token", "empty token stream", {}));
    return result;
  }
  Parser parser(lexed.tokens);
  ScriptModule m;
  m.statements = parser.statements();
  result.diagnostics = std::move(parser.diagnostics());
  if (result.diagnostics.empty()) assign_regions(m, lexed.markers, result.diagnostics);
  if (result.diagnostics.empty() && !m.model_decl()) {
    result.diagnostics.push_back(
        compile_error("parse.missing_model", "script has no 'model' declaration", {1, 1, 0}));
  }
  if (result.diagnostics.empty()) result.module = std::move(m);
  return result;
}

ParseResult parse_source(std::string_view source) { return parse(tokenize(source)); }

bool region_admits(std::string_view region, const Statement& s) {
  if (std::holds_alternative<ParamDecl>(s)) return region != "requirements" && region != "other_objects";
  if (std::holds_alternative<ModelDecl>(s)) return region == "geometry" || region == "defaults";
  if (std::holds_alternative<BehaviorDef>(s)) return region == "behavior";
  if (std::holds_alternative<ObjectDef>(s))
    return region == "defaults" || region == "adversarial_object" || region == "spawn" ||
           region == "other_objects";
  if (std::holds_alternative<RequireStmt>(s)) return region == "requirements";
  return false;
}

ParseResult parse_fragment(std::string_view source, std::string_view region_label) {
  ParseResult result;
  if (!is_region_label(region_label)) {
    result.diagnostics.push_back(compile_error(
        "parse.unknown_region", "unknown region label '" + std::string(region_label) + "'", {1, 1, 0}));
    return result;
  }
  auto lexed = tokenize(source);
  if (!lexed.ok()) {
    result.diagnostics = lexed.diagnostics;
    return result;
  }
  Parser parser(lexed.tokens);
  ScriptModule m;
  m.statements = parser.statements();
  result.diagnostics = std::move(parser.diagnostics());
  if (!result.diagnostics.empty()) return result;
  for (const auto& s : m.statements) {
    if (!region_admits(region_label, s)) {
      result.diagnostics.push_back(compile_error(
          "parse.region_mismatch",
          "statement is not allowed in region '" + std::string(region_label) + "'", span_of(s)));
    }
  }
  if (!result.diagnostics.empty()) return result;
  m.regions.push_back({std::string(region_label), 0, m.statements.size()});
  result.module = std::move(m);
  return result;
}

}  // namespace arise::dsl
