#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "arise/dsl/ast.hpp"
#include "arise/dsl/token.hpp"

namespace arise::dsl {

struct ParseResult {
  std::optional<ScriptModule> module;  // present only when diagnostics is empty
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return module.has_value(); }
};

/// Parses a complete script. Requires a `model` declaration.
ParseResult parse(const LexResult& lexed);

/// tokenize + parse.
ParseResult parse_source(std::string_view source);

/// Parses a snippet destined for one region. No `model` line is required, and
/// every statement must be of a kind the region admits (`parse.region_mismatch`).
ParseResult parse_fragment(std::string_view source, std::string_view region_label);

/// Whether a statement kind may appear in the given region.
bool region_admits(std::string_view region_label, const Statement& statement);

}  // namespace arise::dsl
