#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arise::dsl {

/// 1-based line/column position plus a length in characters.
struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Phase { compile, execute };

std::string_view to_string(Phase phase);

/// Phase-tagged error with a stable machine code. Compile diagnostics carry a
/// span; execute diagnostics carry a non-empty trace.
struct Diagnostic {
  Phase phase = Phase::compile;
  std::string code;
  std::string message;
  std::optional<SourceSpan> span;
  std::vector<std::string> trace;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

Diagnostic compile_error(std::string code, std::string message, SourceSpan span);

/// `[phase/code] message @ line:col` followed by one indented line per trace
/// frame. When `source` is given the offending source line is quoted.
std::string render(const Diagnostic& d, std::string_view source = {});
std::string render_all(const std::vector<Diagnostic>& ds, std::string_view source = {});

bool has_code(const std::vector<Diagnostic>& ds, std::string_view code);

}  // namespace arise::dsl
