#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arise::llm {

enum class Role { system, user, assistant };
std::string_view to_string(Role r);
std::optional<Role> role_from(std::string_view s);

/// Which pipeline stage issued a request; used for logging and mock routing.
enum class Tag { extract, snippet, repair, evaluate };
std::string_view to_string(Tag t);
std::optional<Tag> tag_from(std::string_view s);

/// Sampling temperatures: the default profile and the `precise` profile.
inline constexpr double kDefaultTemperature = 1.0;
inline constexpr double kPreciseTemperature = 0.3;

struct Message {
  Role role = Role::user;
  std::string content;
  friend bool operator==(const Message&, const Message&) = default;
};

struct ChatRequest {
  std::vector<Message> messages;
  double temperature = kDefaultTemperature;
  std::string model;
  int max_tokens = 2048;
  Tag tag = Tag::extract;

  /// Throws `llm.bad_request` unless the first message is a system message and
  /// the temperature lies in [0, 2].
  void check() const;
};

struct Usage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct ChatResponse {
  std::string content;
  std::string provider;
  double latency_ms = 0;
  Usage usage;
  int attempts = 1;
};

/// Stable key over (messages, temperature, model). Tag and max_tokens are
/// deliberately excluded so a recorded answer serves any stage asking the
/// same question.
std::string request_hash(const ChatRequest& request);

/// Canonical JSON text hashed by request_hash.
std::string canonical_request(const ChatRequest& request);

/// Rough token estimate used for prompt budgets: characters / 4, rounded up.
std::size_t approx_tokens(std::string_view text);
std::size_t approx_tokens(const ChatRequest& request);

}  // namespace arise::llm
