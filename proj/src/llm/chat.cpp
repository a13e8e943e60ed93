#include "arise/llm/chat.hpp"

#include <json.hpp>

#include "arise/error.hpp"
#include "arise/util/hash.hpp"

namespace arise::llm {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "?";
}

std::optional<Role> role_from(std::string_view s) {
  for (auto r : {Role::system, Role::user, Role::assistant})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

std::string_view to_string(Tag t) {
  switch (t) {
    case Tag::extract: return "extract";
    case Tag::snippet: return "snippet";
    case Tag::repair: return "repair";
    case Tag::evaluate: return "evaluate";
  }
  return "?";
}

std::optional<Tag> tag_from(std::string_view s) {
  for (auto t : {Tag::extract, Tag::snippet, Tag::repair, Tag::evaluate})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

void ChatRequest::check() const {
  if (messages.empty() || messages.front().role != Role::system)
    throw Error("llm.bad_request", "the first message must have role 'system'");
  if (!(temperature >= 0.0 && temperature <= 2.0))
    throw Error("llm.bad_request", "temperature must lie in [0, 2]");
}

std::string canonical_request(const ChatRequest& request) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : request.messages) msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  nlohmann::json j = {{"messages", msgs}, {"model", request.model}, {"temperature", request.temperature}};
  return j.dump();
}

std::string request_hash(const ChatRequest& request) { return util::content_hash(canonical_request(request)); }

std::size_t approx_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::size_t approx_tokens(const ChatRequest& request) {
  std::size_t n = 0;
  for (const auto& m : request.messages) n += approx_tokens(m.content);
  return n;
}

}  // namespace arise::llm
