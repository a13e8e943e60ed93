#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "arise/dsl/diagnostic.hpp"

namespace arise::dsl {

enum class TokenKind {
  keyword,
  identifier,
  number,
  string,
  op,
  newline,
  indent,
  dedent,
  eof,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::eof;
  std::string text;
  SourceSpan span;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_keyword(std::string_view t) const { return is(TokenKind::keyword, t); }
  bool is_op(std::string_view t) const { return is(TokenKind::op, t); }
};

/// A `#-- region: <label>` line seen by the lexer. Markers are comments to the
/// grammar; the parser uses their line numbers to assign statements to regions.
struct RegionMarker {
  std::string label;
  SourceSpan span;
};

struct LexResult {
  std::vector<Token> tokens;
  std::vector<RegionMarker> markers;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
};

bool is_keyword(std::string_view word);

/// Splits source into tokens with Python-style INDENT/DEDENT synthesis. On any
/// byte outside the DSL alphabet, returns `lex.illegal_char` diagnostics.
LexResult tokenize(std::string_view source);

}  // namespace arise::dsl
