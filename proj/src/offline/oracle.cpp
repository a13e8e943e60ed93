#include "arise/offline/oracle.hpp"

#include <regex>

#include "arise/repair/trl.hpp"
#include "arise/util/text.hpp"

namespace arise::offline {

namespace {

const std::regex kLocation(R"(^\[[a-z]+/[a-z_.]+\] .* @ (\d+):\d+$)");

}  // namespace

std::string restore_first_diagnosed_line(const std::string& script, const std::string& rendered_diagnostics,
                                         const std::string& reference) {
  int line = 0;
  for (const auto& l : util::split_lines(rendered_diagnostics)) {
    std::smatch m;
    if (std::regex_match(l, m, kLocation)) {
      line = std::stoi(m[1]);
      break;
    }
  }
  auto lines = util::split_lines(script);
  auto ref = util::split_lines(reference);
  if (line < 1 || static_cast<std::size_t>(line) > lines.size() || static_cast<std::size_t>(line) > ref.size())
    return script;
  lines[line - 1] = ref[line - 1];
  std::string out;
  for (const auto& l : lines) out += l + '\n';
  return out;
}

llm::MockProvider::Responder line_restore_oracle(std::string reference) {
  return [reference = std::move(reference)](const llm::ChatRequest& r) -> std::optional<std::string> {
    if (r.tag != llm::Tag::repair || r.messages.empty()) return std::nullopt;
    const auto& user = r.messages.back().content;
    auto script_at = user.find(repair::kScriptHeading);
    auto diag_at = user.find(repair::kDiagnosticsHeading);
    if (script_at == std::string::npos || diag_at == std::string::npos) return std::nullopt;
    auto script = util::strip_code_fence(std::string_view(user).substr(script_at + repair::kScriptHeading.size()));
    auto diagnostics = user.substr(diag_at + repair::kDiagnosticsHeading.size());
    return "```\n" + restore_first_diagnosed_line(script, diagnostics, reference) + "```";
  };
}

}  // namespace arise::offline
