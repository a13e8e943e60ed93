#include "arise/llm/provider.hpp"

#include <filesystem>

#include <json.hpp>

#include "arise/error.hpp"
#include "arise/util/text.hpp"

namespace arise::llm {

std::string_view to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::openai_compatible: return "openai_compatible";
    case ProviderKind::gemini: return "gemini";
    case ProviderKind::deepseek: return "deepseek";
    case ProviderKind::mock: return "mock";
    case ProviderKind::replay: return "replay";
    case ProviderKind::heuristic: return "heuristic";
  }
  return "?";
}

std::optional<ProviderKind> provider_kind_from(std::string_view s) {
  for (auto k : {ProviderKind::openai_compatible, ProviderKind::gemini, ProviderKind::deepseek, ProviderKind::mock,
                 ProviderKind::replay, ProviderKind::heuristic})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

ChatResponse MockProvider::complete(const ChatRequest& request) {
  ++calls_;
  ChatResponse r;
  r.provider = name();
  if (responder_) {
    if (auto content = responder_(request)) {
      r.content = *content;
      return r;
    }
  }
  auto it = canned_.find(request.tag);
  if (it == canned_.end())
    throw Error("llm.malformed_response", "mock has no canned response for tag '" + std::string(to_string(request.tag)) + "'");
  r.content = it->second;
  return r;
}

std::string fixture_path(const std::string& dir, const ChatRequest& request) {
  return (std::filesystem::path(dir) / (request_hash(request) + ".json")).string();
}

ChatResponse ReplayProvider::complete(const ChatRequest& request) {
  auto path = fixture_path(dir_, request);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec))
    throw Error("llm.fixture_missing", "no replay fixture for request hash " + request_hash(request) + " (tag " +
                                           std::string(to_string(request.tag)) + ")");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(util::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error("llm.malformed_response", "fixture " + path + " is not valid JSON: " + e.what());
  }
  if (!j.contains("content") || !j["content"].is_string())
    throw Error("llm.malformed_response", "fixture " + path + " has no content");
  ChatResponse r;
  r.content = j["content"].get<std::string>();
  r.provider = name();
  return r;
}

void write_fixture(const std::string& dir, const ChatRequest& request, const std::string& content) {
  nlohmann::json digest = {{"tag", to_string(request.tag)},
                           {"model", request.model},
                           {"temperature", request.temperature},
                           {"messages", request.messages.size()}};
  nlohmann::json j = {{"hash", request_hash(request)}, {"request", digest}, {"content", content}};
  auto path = fixture_path(dir, request);
  auto tmp = path + ".tmp";
  util::write_file(tmp, j.dump(2) + "\n");
  std::filesystem::rename(tmp, path);
}

ChatResponse RecordingProvider::complete(const ChatRequest& request) {
  ChatResponse r = inner_->complete(request);
  std::lock_guard lock(mu_);
  write_fixture(dir_, request, r.content);
  return r;
}

Gateway::Gateway(std::shared_ptr<Provider> provider, std::string default_model, int max_concurrency)
    : provider_(std::move(provider)), default_model_(std::move(default_model)),
      max_concurrency_(std::max(1, max_concurrency)) {}

ChatResponse Gateway::complete(ChatRequest request) {
  if (request.model.empty()) request.model = default_model_;
  request.check();
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < max_concurrency_; });
    ++in_flight_;
  }
  struct Release {
    Gateway* g;
    ~Release() {
      {
        std::lock_guard lock(g->mu_);
        --g->in_flight_;
      }
      g->cv_.notify_one();
    }
  } release{this};

  CallRecord rec;
  rec.tag = request.tag;
  rec.request_hash = request_hash(request);
  rec.provider = provider_->name();
  auto start = std::chrono::steady_clock::now();
  try {
    ChatResponse r = provider_->complete(request);
    rec.attempts = r.attempts;
    rec.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    r.latency_ms = rec.latency_ms;
    if (r.content.empty()) throw Error("llm.malformed_response", "provider returned empty content");
    if (observer_) observer_(rec);
    return r;
  } catch (const Error& e) {
    rec.error_code = e.code();
    rec.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (observer_) observer_(rec);
    throw;
  }
}

}  // namespace arise::llm
