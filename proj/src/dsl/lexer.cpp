#include <algorithm>
#include <array>
#include <cctype>

#include "arise/dsl/token.hpp"
#include "arise/util/text.hpp"

namespace arise::dsl {

namespace {

constexpr std::array kKeywords = {
    "model", "param",  "behavior", "do",    "interrupt", "when",  "require",
    "new",   "on",     "at",       "ahead", "behind",    "left",  "right",
    "of",    "by",     "with",     "facing", "and",      "true",  "false",
};

constexpr std::size_t kMaxLexDiagnostics = 20;

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  LexResult run() {
    std::size_t pos = 0;
    int line = 1;
    while (pos < src_.size()) {
      auto nl = src_.find('\n', pos);
      bool has_nl = nl != std::string_view::npos;
      std::string_view text = src_.substr(pos, has_nl ? nl - pos : std::string_view::npos);
      lex_line(text, line, has_nl);
      if (!has_nl) break;
      pos = nl + 1;
      ++line;
    }
    // EOF sits just past the last character of the last non-empty line.
    std::string_view body = src_;
    if (!body.empty() && body.back() == '\n') body.remove_suffix(1);
    auto last_nl = body.rfind('\n');
    int eof_line = 1 + static_cast<int>(std::count(body.begin(), body.end(), '\n'));
    int end_col = static_cast<int>(body.size() - (last_nl == std::string_view::npos ? 0 : last_nl + 1)) + 1;
    (void)line;
    SourceSpan eof_span{eof_line, end_col, 0};
    while (indents_.size() > 1) {
      indents_.pop_back();
      out_.tokens.push_back({TokenKind::dedent, "", eof_span});
    }
    out_.tokens.push_back({TokenKind::eof, "", eof_span});
    if (!out_.ok()) out_.tokens.clear();
    return std::move(out_);
  }

 private:
  void illegal(int line, int col, char c) {
    if (out_.diagnostics.size() >= kMaxLexDiagnostics) return;
    std::string shown;
    auto uc = static_cast<unsigned char>(c);
    if (uc >= 0x20 && uc < 0x7F) {
      shown = std::string("'") + c + "'";
    } else {
      static constexpr char kHex[] = "0123456789abcdef";
      shown = std::string("byte 0x") + kHex[uc >> 4] + kHex[uc & 0xF];
    }
    out_.diagnostics.push_back(
        compile_error("lex.illegal_char", "illegal character " + shown, {line, col, 1}));
  }

  void push(TokenKind kind, std::string_view text, int line, std::size_t col0) {
    out_.tokens.push_back({kind, std::string(text),
                           {line, static_cast<int>(col0) + 1, static_cast<int>(text.size())}});
  }

  void lex_line(std::string_view text, int line, bool has_nl) {
    std::size_t i = 0;
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t indent = i;
    std::string_view rest = text.substr(i);
    while (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);

    if (rest.empty() || rest.front() == '#') {
      if (depth_ == 0 && !rest.empty()) maybe_marker(rest, line, indent);
      return;
    }

    if (depth_ == 0) {
      SourceSpan at{line, 1, static_cast<int>(indent)};
      if (indent > indents_.back()) {
        indents_.push_back(indent);
        out_.tokens.push_back({TokenKind::indent, "", at});
      } else {
        while (indent < indents_.back()) {
          indents_.pop_back();
          out_.tokens.push_back({TokenKind::dedent, "", at});
        }
        if (indent != indents_.back()) {
          // Dedent to a column that never opened a block; surfaces as an
          // unexpected INDENT for the parser to report.
          indents_.push_back(indent);
          out_.tokens.push_back({TokenKind::indent, "", at});
        }
      }
    }

    bool emitted = false;
    while (i < text.size()) {
      char c = text[i];
      if (c == ' ' || c == '\r') {
        ++i;
        continue;
      }
      if (c == '#') break;
      std::size_t start = i;
      if (ident_start(c)) {
        while (i < text.size() && ident_char(text[i])) ++i;
        auto word = text.substr(start, i - start);
        push(is_keyword(word) ? TokenKind::keyword : TokenKind::identifier, word, line, start);
      } else if (digit(c)) {
        while (i < text.size() && digit(text[i])) ++i;
        if (i + 1 < text.size() && text[i] == '.' && digit(text[i + 1])) {
          ++i;
          while (i < text.size() && digit(text[i])) ++i;
        }
        push(TokenKind::number, text.substr(start, i - start), line, start);
      } else if (c == '"' || c == '\'') {
        ++i;
        bool closed = false;
        while (i < text.size()) {
          if (text[i] == '\\' && i + 1 < text.size()) {
            i += 2;
            continue;
          }
          if (text[i] == c) {
            closed = true;
            ++i;
            break;
          }
          ++i;
        }
        if (!closed) {
          if (out_.diagnostics.size() < kMaxLexDiagnostics)
            out_.diagnostics.push_back(compile_error(
                "lex.unterminated_string", "string literal is not closed on this line",
                {line, static_cast<int>(start) + 1, static_cast<int>(i - start)}));
          return;
        }
        push(TokenKind::string, text.substr(start, i - start), line, start);
      } else {
        std::size_t len = 0;
        if (i + 1 < text.size()) {
          auto two = text.substr(i, 2);
          if (two == "==" || two == "!=" || two == "<=" || two == ">=") len = 2;
        }
        if (len == 0 && std::string_view("=<>(),.:-+").find(c) != std::string_view::npos) len = 1;
        if (len == 0) {
          illegal(line, static_cast<int>(i) + 1, c);
          ++i;
          continue;
        }
        if (c == '(') ++depth_;
        if (c == ')' && depth_ > 0) --depth_;
        push(TokenKind::op, text.substr(i, len), line, i);
        i += len;
      }
      emitted = true;
    }
    if (emitted && depth_ == 0 && has_nl) {
      out_.tokens.push_back({TokenKind::newline, "\n", {line, static_cast<int>(text.size()) + 1, 1}});
    }
  }

  void maybe_marker(std::string_view comment, int line, std::size_t indent) {
    constexpr std::string_view kPrefix = "#-- region:";
    if (comment.substr(0, kPrefix.size()) != kPrefix) return;
    auto label = util::trim(comment.substr(kPrefix.size()));
    out_.markers.push_back({std::string(label),
                            {line, static_cast<int>(indent) + 1, static_cast<int>(comment.size())}});
  }

  std::string_view src_;
  LexResult out_;
  std::vector<std::size_t> indents_{0};
  int depth_ = 0;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::keyword: return "keyword";
    case TokenKind::identifier: return "identifier";
    case TokenKind::number: return "number";
    case TokenKind::string: return "string";
    case TokenKind::op: return "operator";
    case TokenKind::newline: return "newline";
    case TokenKind::indent: return "indent";
    case TokenKind::dedent: return "dedent";
    case TokenKind::eof: return "eof";
  }
  return "?";
}

bool is_keyword(std::string_view word) {
  for (const char* k : kKeywords)
    if (word == k) return true;
  return false;
}

LexResult tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace arise::dsl
