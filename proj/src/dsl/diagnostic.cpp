#include "arise/dsl/diagnostic.hpp"

#include <algorithm>

#include "arise/util/text.hpp"

namespace arise::dsl {

std::string_view to_string(Phase phase) {
  return phase == Phase::compile ? "compile" : "execute";
}

Diagnostic compile_error(std::string code, std::string message, SourceSpan span) {
  return Diagnostic{Phase::compile, std::move(code), std::move(message), span, {}};
}

std::string render(const Diagnostic& d, std::string_view source) {
  std::string out = "[";
  out += to_string(d.phase);
  out += '/';
  out += d.code;
  out += "] ";
  out += d.message;
  if (d.span) {
    out += " @ " + std::to_string(d.span->line) + ":" + std::to_string(d.span->column);
  }
  out += '\n';
  if (d.span && !source.empty()) {
    auto lines = util::split_lines(source);
    auto idx = static_cast<std::size_t>(d.span->line - 1);
    if (idx < lines.size()) out += "    | " + lines[idx] + "\n";
  }
  for (const auto& frame : d.trace) out += "    at " + frame + "\n";
  return out;
}

std::string render_all(const std::vector<Diagnostic>& ds, std::string_view source) {
  std::string out;
  for (const auto& d : ds) out += render(d, source);
  return out;
}

bool has_code(const std::vector<Diagnostic>& ds, std::string_view code) {
  return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.code == code; });
}

}  // namespace arise::dsl
