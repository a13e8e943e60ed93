#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "arise/llm/chat.hpp"

namespace arise::llm {

/// A chat-completion backend. Implementations must be safe for concurrent use.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;
};

enum class ProviderKind { openai_compatible, gemini, deepseek, mock, replay, heuristic };
std::string_view to_string(ProviderKind k);
std::optional<ProviderKind> provider_kind_from(std::string_view s);

struct RetryPolicy {
  int max_retries = 3;
  double backoff_base_s = 1.0;  // waits base, 2*base, 4*base, ...
};

/// Endpoint settings. `credential_env` names an environment variable; the key
/// itself is never stored in configuration, logs or fixtures.
struct ProviderConfig {
  ProviderKind kind = ProviderKind::heuristic;
  std::string endpoint;
  std::string credential_env;
  std::string default_model;
  double timeout_s = 60;
  RetryPolicy retry;
  std::string fixture_dir;  // replay
};

/// Canned responses keyed by tag, with an optional responder consulted first.
class MockProvider final : public Provider {
 public:
  using Responder = std::function<std::optional<std::string>(const ChatRequest&)>;
  explicit MockProvider(std::map<Tag, std::string> canned = {}, Responder responder = {})
      : canned_(std::move(canned)), responder_(std::move(responder)) {}
  ChatResponse complete(const ChatRequest& request) override;
  std::string name() const override { return "mock"; }
  int calls() const { return calls_.load(); }

 private:
  std::map<Tag, std::string> canned_;
  Responder responder_;
  std::atomic<int> calls_{0};
};

/// Serves responses from `<dir>/<request_hash>.json`; never touches the network.
class ReplayProvider final : public Provider {
 public:
  explicit ReplayProvider(std::string dir) : dir_(std::move(dir)) {}
  /// Throws `llm.fixture_missing` naming the request hash.
  ChatResponse complete(const ChatRequest& request) override;
  std::string name() const override { return "replay"; }

 private:
  std::string dir_;
};

/// Forwards to another provider and writes each answer as a replay fixture.
class RecordingProvider final : public Provider {
 public:
  RecordingProvider(std::shared_ptr<Provider> inner, std::string dir) : inner_(std::move(inner)), dir_(std::move(dir)) {}
  ChatResponse complete(const ChatRequest& request) override;
  std::string name() const override { return inner_->name(); }

 private:
  std::shared_ptr<Provider> inner_;
  std::string dir_;
  std::mutex mu_;
};

std::string fixture_path(const std::string& dir, const ChatRequest& request);
void write_fixture(const std::string& dir, const ChatRequest& request, const std::string& content);

/// Remote providers over HTTP(S). Transient failures (timeouts, 429, 5xx,
/// refused connections) are retried with exponential backoff; the sleeper is
/// injectable so tests need not wait.
using Sleeper = std::function<void(std::chrono::duration<double>)>;
std::shared_ptr<Provider> make_http_provider(const ProviderConfig& config, Sleeper sleeper = {});

/// One record per completed or failed call.
struct CallRecord {
  Tag tag = Tag::extract;
  std::string request_hash;
  std::string provider;
  int attempts = 0;
  double latency_ms = 0;
  std::string error_code;  // empty on success
};

/// Front door for every LLM touchpoint: validates requests, fills in the
/// default model, caps in-flight calls and reports each call to an observer.
class Gateway {
 public:
  Gateway(std::shared_ptr<Provider> provider, std::string default_model, int max_concurrency = 4);

  ChatResponse complete(ChatRequest request);
  const std::string& default_model() const { return default_model_; }
  std::string provider_name() const { return provider_->name(); }

  using Observer = std::function<void(const CallRecord&)>;
  void set_observer(Observer observer) { observer_ = std::move(observer); }

 private:
  std::shared_ptr<Provider> provider_;
  std::string default_model_;
  int max_concurrency_;
  int in_flight_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
  Observer observer_;
};

}  // namespace arise::llm
