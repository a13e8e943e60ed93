#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "arise/error.hpp"
#include "arise/llm/http.hpp"

namespace arise::llm {

namespace {

using nlohmann::json;

struct Attempt {
  int status = 0;                      // 0 when no response arrived
  httplib::Error error = httplib::Error::Success;
  std::string body;
};

bool transient(const Attempt& a) {
  if (a.status == 0) return true;
  return a.status == 429 || a.status >= 500;
}

std::string excerpt(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

std::string credential(const ProviderConfig& config) {
  if (config.credential_env.empty()) return {};
  const char* value = std::getenv(config.credential_env.c_str());
  if (value == nullptr || *value == '\0')
    throw Error("llm.auth", "environment variable " + config.credential_env + " is not set");
  return value;
}

class HttpClient {
 public:
  HttpClient(const ProviderConfig& config, Sleeper sleeper) : config_(config), sleeper_(std::move(sleeper)) {
    if (!sleeper_) sleeper_ = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
    std::tie(base_, prefix_) = split_endpoint(config_.endpoint);
  }

  /// POSTs JSON with retry; returns the parsed body and attempt count.
  std::pair<json, int> post(const std::string& path, const json& body, const httplib::Headers& headers) {
    int max_attempts = std::max(0, config_.retry.max_retries) + 1;
    Attempt last;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
      last = once(prefix_ + path, body.dump(), headers);
      if (last.status == 200) {
        try {
          return {json::parse(last.body), attempt};
        } catch (const json::exception&) {
          throw Error("llm.malformed_response", "response body is not JSON: " + excerpt(last.body));
        }
      }
      if (last.status == 401 || last.status == 403)
        throw Error("llm.auth", "provider rejected credentials (HTTP " + std::to_string(last.status) + ")");
      if (!transient(last))
        throw Error("llm.bad_request", "HTTP " + std::to_string(last.status) + ": " + excerpt(last.body));
      if (attempt < max_attempts) sleeper_(std::chrono::duration<double>(config_.retry.backoff_base_s * std::pow(2.0, attempt - 1)));
    }
    std::string tail = " after " + std::to_string(max_attempts) + " attempts";
    if (last.status == 429) throw Error("llm.rate_limited", "rate limited" + tail);
    if (last.status == 0 && (last.error == httplib::Error::Read || last.error == httplib::Error::Write ||
                             last.error == httplib::Error::ConnectionTimeout))
      throw Error("llm.timeout", "request timed out" + tail);
    if (last.status == 0) throw Error("llm.unavailable", "connection failed (" + httplib::to_string(last.error) + ")" + tail);
    throw Error("llm.unavailable", "HTTP " + std::to_string(last.status) + tail);
  }

 private:
  Attempt once(const std::string& path, const std::string& payload, const httplib::Headers& headers) {
    httplib::Client client(base_);
    auto timeout = std::chrono::duration<double>(config_.timeout_s);
    auto secs = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
    client.set_connection_timeout(secs);
    client.set_read_timeout(secs);
    client.set_write_timeout(secs);
    Attempt a;
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      a.error = res.error();
      return a;
    }
    a.status = res->status;
    a.body = res->body;
    return a;
  }

  ProviderConfig config_;
  Sleeper sleeper_;
  std::string base_, prefix_;
};

json openai_messages(const ChatRequest& request) {
  json out = json::array();
  for (const auto& m : request.messages) out.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  return out;
}

class OpenAiProvider final : public Provider {
 public:
  OpenAiProvider(ProviderConfig config, Sleeper sleeper) : config_(std::move(config)), http_(config_, std::move(sleeper)) {}

  ChatResponse complete(const ChatRequest& request) override {
    json body = {{"model", request.model},
                 {"messages", openai_messages(request)},
                 {"temperature", request.temperature},
                 {"max_tokens", request.max_tokens}};
    httplib::Headers headers;
    if (auto key = credential(config_); !key.empty()) headers.emplace("Authorization", "Bearer " + key);
    auto [j, attempts] = http_.post("/chat/completions", body, headers);
    ChatResponse r;
    r.provider = name();
    r.attempts = attempts;
    try {
      r.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
      if (j.contains("usage")) {
        r.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
        r.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
      }
    } catch (const json::exception&) {
      throw Error("llm.malformed_response", "chat completion has no choices[0].message.content");
    }
    return r;
  }
  std::string name() const override { return std::string(to_string(config_.kind)); }

 private:
  ProviderConfig config_;
  HttpClient http_;
};

class GeminiProvider final : public Provider {
 public:
  GeminiProvider(ProviderConfig config, Sleeper sleeper) : config_(std::move(config)), http_(config_, std::move(sleeper)) {}

  ChatResponse complete(const ChatRequest& request) override {
    json contents = json::array();
    std::string system;
    for (const auto& m : request.messages) {
      if (m.role == Role::system) {
        system += (system.empty() ? "" : "\n\n") + m.content;
        continue;
      }
      contents.push_back({{"role", m.role == Role::assistant ? "model" : "user"}, {"parts", {{{"text", m.content}}}}});
    }
    json body = {{"contents", contents},
                 {"generationConfig", {{"temperature", request.temperature}, {"maxOutputTokens", request.max_tokens}}}};
    if (!system.empty()) body["systemInstruction"] = {{"parts", {{{"text", system}}}}};
    httplib::Headers headers;
    if (auto key = credential(config_); !key.empty()) headers.emplace("x-goog-api-key", key);
    auto [j, attempts] = http_.post("/models/" + request.model + ":generateContent", body, headers);
    ChatResponse r;
    r.provider = name();
    r.attempts = attempts;
    try {
      for (const auto& part : j.at("candidates").at(0).at("content").at("parts")) r.content += part.at("text").get<std::string>();
      if (j.contains("usageMetadata")) {
        r.usage.prompt_tokens = j["usageMetadata"].value("promptTokenCount", 0);
        r.usage.completion_tokens = j["usageMetadata"].value("candidatesTokenCount", 0);
      }
    } catch (const json::exception&) {
      throw Error("llm.malformed_response", "generateContent has no candidates[0].content.parts");
    }
    return r;
  }
  std::string name() const override { return "gemini"; }

 private:
  ProviderConfig config_;
  HttpClient http_;
};

}  // namespace

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  auto scheme = endpoint.find("://");
  auto start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = endpoint.find('/', start);
  if (slash == std::string::npos) return {endpoint, ""};
  std::string prefix = endpoint.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {endpoint.substr(0, slash), prefix};
}

std::string default_endpoint(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::openai_compatible: return "https://api.openai.com/v1";
    case ProviderKind::deepseek: return "https://api.deepseek.com";
    case ProviderKind::gemini: return "https://generativelanguage.googleapis.com/v1beta";
    default: return {};
  }
}

std::shared_ptr<Provider> make_http_provider(const ProviderConfig& config, Sleeper sleeper) {
  ProviderConfig c = config;
  if (c.endpoint.empty()) c.endpoint = default_endpoint(c.kind);
  switch (c.kind) {
    case ProviderKind::openai_compatible:
    case ProviderKind::deepseek: return std::make_shared<OpenAiProvider>(std::move(c), std::move(sleeper));
    case ProviderKind::gemini: return std::make_shared<GeminiProvider>(std::move(c), std::move(sleeper));
    default: throw Error("config.bad_provider", "provider '" + std::string(to_string(c.kind)) + "' is not an HTTP provider");
  }
}

HttpEmbedder::HttpEmbedder(ProviderConfig config, std::string model) : config_(std::move(config)), model_(std::move(model)) {
  if (config_.endpoint.empty()) config_.endpoint = default_endpoint(ProviderKind::openai_compatible);
}

kb::Vector HttpEmbedder::embed(std::string_view text) const {
  bool blank = true;
  for (char c : text) blank = blank && std::isspace(static_cast<unsigned char>(c));
  if (blank) throw Error("embed.empty_text", "cannot embed blank text");
  HttpClient http(config_, {});
  httplib::Headers headers;
  if (auto key = credential(config_); !key.empty()) headers.emplace("Authorization", "Bearer " + key);
  auto [j, attempts] = http.post("/embeddings", {{"model", model_}, {"input", std::string(text)}}, headers);
  (void)attempts;
  kb::Vector v;
  try {
    v = j.at("data").at(0).at("embedding").get<kb::Vector>();
  } catch (const json::exception&) {
    throw Error("llm.malformed_response", "embedding response has no data[0].embedding");
  }
  double n = kb::l2_norm(v);
  if (n == 0) throw Error("llm.malformed_response", "embedding vector is zero");
  for (auto& x : v) x /= n;
  return v;
}

}  // namespace arise::llm
