#include <gtest/gtest.h>

#include <random>

#include "arise/dsl/analyzer.hpp"
#include "arise/dsl/format.hpp"
#include "arise/dsl/parser.hpp"
#include "arise/dsl/token.hpp"
#include "common/faults.hpp"
#include "support.hpp"

using namespace arise::dsl;
using testing_support::read;
using testing_support::seed_paths;

namespace {

const MapCatalog kMaps = {"four_way", "straight", "t_junction"};

// Reference lexer: one pass over character classes, counting tokens without
// building them. Independent of the production lexer's structure.
std::size_t oracle_token_count(const std::string& src) {
  std::size_t count = 0;
  std::vector<std::size_t> stack{0};
  std::size_t pos = 0;
  while (pos < src.size()) {
    std::size_t eol = src.find('\n', pos);
    bool has_nl = eol != std::string::npos;
    std::string line = src.substr(pos, has_nl ? eol - pos : std::string::npos);
    pos = has_nl ? eol + 1 : src.size();
    std::size_t indent = line.find_first_not_of(' ');
    if (indent == std::string::npos || line[indent] == '#') continue;
    if (indent > stack.back()) {
      stack.push_back(indent);
      ++count;
    }
    while (indent < stack.back()) {
      stack.pop_back();
      ++count;
    }
    std::size_t tokens = 0;
    for (std::size_t i = indent; i < line.size();) {
      unsigned char c = line[i];
      if (c == ' ') { ++i; continue; }
      if (c == '#') break;
      ++tokens;
      if (std::isalpha(c) || c == '_') {
        while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) ++i;
      } else if (std::isdigit(c)) {
        while (i < line.size() && (std::isdigit(static_cast<unsigned char>(line[i])) || line[i] == '.')) ++i;
      } else if (c == '"') {
        i = line.find('"', i + 1) + 1;
      } else if (i + 1 < line.size() && line[i + 1] == '=' && std::string_view("=!<>").find(c) != std::string_view::npos) {
        i += 2;
      } else {
        ++i;
      }
    }
    if (tokens && has_nl) ++count;
    count += tokens;
  }
  return count + (stack.size() - 1) + 1;
}

std::vector<TokenKind> kinds(const LexResult& r) {
  std::vector<TokenKind> out;
  for (const auto& t : r.tokens) out.push_back(t.kind);
  return out;
}

bool span_within(const SourceSpan& s, const std::string& src) {
  auto lines = arise::util::split_lines(src);
  if (s.line < 1 || s.column < 1 || s.length < 0) return false;
  if (static_cast<std::size_t>(s.line) > std::max<std::size_t>(lines.size(), 1)) return false;
  std::size_t width = lines.empty() ? 0 : lines[s.line - 1].size();
  return static_cast<std::size_t>(s.column - 1 + s.length) <= width + 1;
}

}  // namespace

TEST(Lexer, SimpleAssignment) {
  auto r = tokenize("ego = new Car");
  ASSERT_TRUE(r.diagnostics.empty());
  EXPECT_EQ(kinds(r), (std::vector<TokenKind>{TokenKind::identifier, TokenKind::op, TokenKind::keyword,
                                              TokenKind::identifier, TokenKind::eof}));
  EXPECT_EQ(r.tokens[0].text, "ego");
  EXPECT_EQ(r.tokens[2].text, "new");
  EXPECT_EQ(r.tokens[3].text, "Car");
}

TEST(Lexer, EmptyInputIsJustEof) {
  auto r = tokenize("");
  ASSERT_EQ(r.tokens.size(), 1u);
  EXPECT_EQ(r.tokens[0].kind, TokenKind::eof);
}

TEST(Lexer, IllegalCharacterHasSpan) {
  auto r = tokenize("ego = new Car\nx = $\n");
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].code, "lex.illegal_char");
  ASSERT_TRUE(r.diagnostics[0].span);
  EXPECT_EQ(r.diagnostics[0].span->line, 2);
  EXPECT_EQ(r.diagnostics[0].span->column, 5);
}

TEST(Lexer, TabIsIllegal) {
  auto r = tokenize("behavior B():\n\tdo wait()\n");
  EXPECT_TRUE(has_code(r.diagnostics, "lex.illegal_char"));
}

TEST(Lexer, RegionMarkersCollected) {
  auto r = tokenize("#-- region: geometry\nmodel a\n# plain comment\n#-- region: spawn\n");
  ASSERT_EQ(r.markers.size(), 2u);
  EXPECT_EQ(r.markers[0].label, "geometry");
  EXPECT_EQ(r.markers[1].label, "spawn");
}

TEST(Lexer, OracleTokenCountsOverCorpus) {
  auto paths = seed_paths();
  ASSERT_EQ(paths.size(), 40u);
  for (const auto& p : paths) {
    auto src = read(p);
    auto r = tokenize(src);
    ASSERT_TRUE(r.diagnostics.empty()) << p;
    EXPECT_EQ(r.tokens.size(), oracle_token_count(src)) << p;
  }
}

TEST(Lexer, TokenTextsReproduceNonWhitespaceContent) {
  for (const auto& p : seed_paths()) {
    auto src = read(p);
    auto r = tokenize(src);
    std::string joined, expected;
    for (const auto& t : r.tokens)
      if (t.kind != TokenKind::indent && t.kind != TokenKind::dedent && t.kind != TokenKind::eof &&
          t.kind != TokenKind::newline)
        joined += t.text;
    for (const auto& line : arise::util::split_lines(src)) {
      auto body = arise::util::trim(line);
      if (body.empty() || body.front() == '#') continue;
      for (char c : body)
        if (c != ' ') expected += c;
    }
    EXPECT_EQ(joined, expected) << p;
  }
}

TEST(Lexer, SpansStrictlyIncreaseAndBlocksBalance) {
  for (const auto& p : seed_paths()) {
    auto r = tokenize(read(p));
    int depth = 0;
    std::pair<int, int> last{0, 0};
    std::size_t eofs = 0;
    for (const auto& t : r.tokens) {
      if (t.kind == TokenKind::indent) ++depth;
      if (t.kind == TokenKind::dedent) --depth;
      if (t.kind == TokenKind::eof) ++eofs;
      ASSERT_GE(depth, 0);
      if (t.kind == TokenKind::indent || t.kind == TokenKind::dedent || t.kind == TokenKind::eof) continue;
      std::pair<int, int> here{t.span.line, t.span.column};
      EXPECT_LT(last, here) << p << " at " << t.text;
      last = here;
    }
    EXPECT_EQ(depth, 0) << p;
    EXPECT_EQ(eofs, 1u);
    EXPECT_EQ(r.tokens.back().kind, TokenKind::eof);
  }
}

TEST(Parser, MinimalScript) {
  auto r = parse_source("model basic\nego = new Car on lane(0)");
  ASSERT_TRUE(r.ok()) << render_all(r.diagnostics);
  EXPECT_EQ(r.module->objects().size(), 1u);
  EXPECT_EQ(r.module->behaviors().size(), 0u);
  EXPECT_EQ(r.module->model_decl()->name, "basic");
  ASSERT_EQ(r.module->regions.size(), 1u);
  EXPECT_EQ(r.module->regions[0].label, "defaults");
}

TEST(Parser, MissingModel) {
  auto r = parse_source("ego = new Car on lane(0)\n");
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_code(r.diagnostics, "parse.missing_model"));
}

TEST(Parser, UnexpectedToken) {
  auto r = parse_source("model basic\nego = new Car on lane(0) extra\n");
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_code(r.diagnostics, "parse.unexpected_token"));
  for (const auto& d : r.diagnostics) EXPECT_EQ(d.phase, Phase::compile);
}

TEST(Parser, BadIndent) {
  auto r = parse_source("model basic\n    ego = new Car on lane(0)\n");
  EXPECT_TRUE(has_code(r.diagnostics, "parse.bad_indent"));
  auto r2 = parse_source("model basic\nbehavior B():\n    do wait()\n  do wait()\n");
  EXPECT_TRUE(has_code(r2.diagnostics, "parse.bad_indent"));
}

TEST(Parser, BehaviorWithInterrupt) {
  auto r = parse_source(
      "model m\nbehavior Cut(speed: number, d: direction):\n    do accelerate(speed)\n    do lane_change(d)\n"
      "    interrupt when distance(self, ego) < 5 and ego.speed > 2:\n        do brake(0.5)\n"
      "ego = new Car on lane(0) with behavior Cut(12, right)\n");
  ASSERT_TRUE(r.ok()) << render_all(r.diagnostics);
  auto b = r.module->behaviors();
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0]->params.size(), 2u);
  EXPECT_EQ(b[0]->params[1].type, ParamType::direction);
  EXPECT_EQ(b[0]->actions.size(), 2u);
  ASSERT_EQ(b[0]->interrupts.size(), 1u);
  EXPECT_EQ(b[0]->interrupts[0].when.terms.size(), 2u);
}

TEST(Parser, PlacementForms) {
  auto r = parse_source(
      "model m\nego = new Car on lane(1)\na = new Truck ahead of ego by 12\nb = new Prop at (3, -4.5) facing 90\n"
      "c = new Pedestrian right of a\n");
  ASSERT_TRUE(r.ok()) << render_all(r.diagnostics);
  auto objs = r.module->objects();
  EXPECT_EQ(objs[0]->placement.anchor, Anchor::on_lane);
  EXPECT_EQ(objs[1]->placement.anchor, Anchor::relative);
  EXPECT_EQ(*objs[1]->placement.relation, Relation::ahead_of);
  EXPECT_EQ(*objs[1]->placement.distance->number(), 12);
  EXPECT_EQ(objs[2]->placement.anchor, Anchor::absolute_point);
  EXPECT_EQ(*(*objs[2]->placement.point)[1].number(), -4.5);
  EXPECT_EQ(*objs[2]->placement.heading->number(), 90);
  EXPECT_FALSE(objs[3]->placement.distance);
}

TEST(Parser, RegionsCoverEveryStatement) {
  for (const auto& p : seed_paths()) {
    auto r = parse_source(read(p));
    ASSERT_TRUE(r.ok()) << p;
    std::vector<int> hits(r.module->statements.size(), 0);
    for (const auto& reg : r.module->regions)
      for (auto i = reg.begin; i < reg.end; ++i) ++hits[i];
    for (int h : hits) EXPECT_EQ(h, 1) << p;
    EXPECT_EQ(r.module->regions.size(), 8u);
  }
}

TEST(Parser, DuplicateAndUnknownRegions) {
  EXPECT_TRUE(has_code(parse_source("#-- region: geometry\nmodel m\n#-- region: geometry\n").diagnostics,
                       "parse.duplicate_region"));
  EXPECT_TRUE(has_code(parse_source("#-- region: scenery\nmodel m\n").diagnostics, "parse.unknown_region"));
}

TEST(Parser, FragmentParsing) {
  EXPECT_TRUE(parse_fragment("behavior B():\n    do wait()\n", "behavior").ok());
  EXPECT_TRUE(parse_fragment("param weather = \"rain\"\n", "weather").ok());
  auto bad = parse_fragment("require ego.speed > 1\n", "behavior");
  EXPECT_TRUE(has_code(bad.diagnostics, "parse.region_mismatch"));
  EXPECT_FALSE(parse_fragment("adv = new Carr on lane(0)\n", "spawn").ok());
}

TEST(Parser, DeletionMutantsNeverCrash) {
  std::mt19937_64 rng(42);
  auto paths = seed_paths();
  for (int i = 0; i < 200; ++i) {
    auto src = read(paths[rng() % paths.size()]);
    auto lexed = tokenize(src);
    auto& toks = lexed.tokens;
    toks.erase(toks.begin() + static_cast<long>(rng() % (toks.size() - 1)));
    auto r = parse(lexed);
    if (!r.ok()) {
      EXPECT_FALSE(r.diagnostics.empty());
      for (const auto& d : r.diagnostics) EXPECT_EQ(d.code.rfind("parse.", 0), 0u) << d.code;
    }
  }
}

TEST(Parser, ArbitraryBytesAreTotalAndSpansSound) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abcegilmnorstw_ =()<>.:,-+\"#\n    \t$\x01\xff" "0123456789";
  for (int i = 0; i < 300; ++i) {
    std::string src;
    std::size_t n = rng() % 400;
    for (std::size_t k = 0; k < n; ++k) src += alphabet[rng() % alphabet.size()];
    auto r = parse_source(src);
    for (const auto& d : r.diagnostics) {
      ASSERT_TRUE(d.span);
      EXPECT_TRUE(span_within(*d.span, src)) << d.code << " " << d.span->line << ":" << d.span->column;
    }
    if (r.ok()) (void)analyze(*r.module, kMaps);
  }
}

TEST(Parser, LargeInputIsHandled) {
  std::string src = "model m\n";
  while (src.size() < 60 * 1024) src += "param p" + std::to_string(src.size()) + " = 1\n";
  auto r = parse_source(src);
  EXPECT_TRUE(r.ok());
  std::string junk(64 * 1024, '(');
  EXPECT_FALSE(parse_source(junk).ok());
}

TEST(Analyzer, CorpusIsClean) {
  for (const auto& p : seed_paths()) {
    auto r = parse_source(read(p));
    ASSERT_TRUE(r.ok()) << p;
    auto ds = analyze(*r.module, kMaps);
    EXPECT_TRUE(ds.empty()) << p << "\n" << render_all(ds);
  }
}

TEST(Analyzer, InjectedFaultsAreDetected) {
  for (const auto& p : seed_paths()) {
    auto src = read(p);
    for (auto f : faults::kAll) {
      auto broken = faults::inject(src, f);
      auto r = parse_source(broken);
      ASSERT_TRUE(r.ok()) << p;
      auto ds = analyze(*r.module, kMaps);
      EXPECT_TRUE(has_code(ds, faults::expected_code(f))) << p << " " << faults::expected_code(f) << "\n"
                                                          << render_all(ds);
      for (const auto& d : ds) {
        ASSERT_TRUE(d.span);
        EXPECT_TRUE(span_within(*d.span, broken));
      }
    }
  }
}

TEST(Analyzer, UndefinedBehaviorNamed) {
  auto r = parse_source("model m\nego = new Car on lane(0)\nadv = new Car ahead of ego with behavior FollowGhost()\n");
  ASSERT_TRUE(r.ok());
  auto ds = analyze(*r.module, kMaps);
  ASSERT_TRUE(has_code(ds, "sem.undefined_behavior"));
  EXPECT_NE(ds[0].message.find("FollowGhost"), std::string::npos);
}

TEST(Analyzer, DuplicateAdversary) {
  auto r = parse_source("model m\nego = new Car on lane(0)\nadv = new Car ahead of ego\nadv = new Truck behind ego\n");
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(has_code(analyze(*r.module, kMaps), "sem.duplicate_name"));
}

TEST(Analyzer, OtherChecks) {
  auto check = [](const std::string& body, std::string_view code) {
    auto r = parse_source("model m\n" + body);
    ASSERT_TRUE(r.ok()) << render_all(r.diagnostics);
    auto ds = analyze(*r.module, kMaps);
    EXPECT_TRUE(has_code(ds, code)) << body << "\n" << render_all(ds);
  };
  check("ego = new Car on lane(0) with behavior FollowLaneBehavior(1, 2)\n", "sem.arity_mismatch");
  check("ego = new Car on lane(0)\nadv = new Car ahead of ego by 0\n", "sem.bad_distance");
  check("ego = new Car ahead of adv\nadv = new Car ahead of ego\n", "sem.placement_cycle");
  check("ego = new Car on lane(SOMEWHERE)\n", "sem.undefined_name");
  check("behavior B(d: direction):\n    do lane_change(d)\nego = new Car on lane(0) with behavior B(12)\n",
        "sem.type_mismatch");
  check("param map = \"mars\"\nego = new Car on lane(0)\n", "sem.unknown_map");
}

TEST(Format, RoundTripAndIdempotence) {
  for (const auto& p : seed_paths()) {
    auto src = read(p);
    auto first = parse_source(src);
    ASSERT_TRUE(first.ok());
    auto text = format(*first.module);
    EXPECT_EQ(text, src) << p;
    auto second = parse_source(text);
    ASSERT_TRUE(second.ok());
    EXPECT_EQ(*second.module, *first.module) << p;
    EXPECT_EQ(format(*second.module), text);
  }
}

TEST(Format, MinimalScriptRoundTrip) {
  auto m = parse_source("model basic\nego = new Car on lane(0)");
  ASSERT_TRUE(m.ok());
  auto text = format(*m.module);
  EXPECT_EQ(text, "#-- region: defaults\nmodel basic\nego = new Car on lane(0)\n");
  auto again = parse_source(text);
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*again.module, *m.module);
}

TEST(Format, NonCanonicalInputNormalizes) {
  auto m = parse_source(
      "#-- region: geometry\nmodel   m\nparam x=1.50\n#-- region: behavior\nbehavior B( s ):\n  do follow_lane( s )\n"
      "#-- region: defaults\nego = new Car on lane( 0 ) with behavior B(3) with color 'red'\n");
  ASSERT_TRUE(m.ok()) << render_all(m.diagnostics);
  EXPECT_EQ(format(*m.module),
            "#-- region: geometry\nmodel m\nparam x = 1.5\n\n#-- region: behavior\nbehavior B(s):\n"
            "    do follow_lane(s)\n\n#-- region: defaults\nego = new Car on lane(0) with behavior B(3) with color "
            "\"red\"\n");
}

TEST(Diagnostics, RenderQuotesSourceLine) {
  auto r = parse_source("model m\nego = new Car on lane(0) extra\n");
  ASSERT_FALSE(r.ok());
  auto text = render(r.diagnostics[0], "model m\nego = new Car on lane(0) extra\n");
  EXPECT_EQ(text.rfind("[compile/parse.unexpected_token] ", 0), 0u) << text;
  EXPECT_NE(text.find("@ 2:"), std::string::npos);
  EXPECT_NE(text.find("    | ego = new Car on lane(0) extra"), std::string::npos);
}
