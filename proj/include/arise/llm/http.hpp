#pragma once

#include <memory>
#include <string>

#include "arise/kb/embedding.hpp"
#include "arise/llm/provider.hpp"

namespace arise::llm {

/// Splits "https://host:port/prefix" into ("https://host:port", "/prefix").
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint);

/// Default endpoint per remote provider kind.
std::string default_endpoint(ProviderKind kind);

/// OpenAI-compatible `/embeddings` client. Vectors are L2-normalised.
class HttpEmbedder final : public kb::Embedder {
 public:
  HttpEmbedder(ProviderConfig config, std::string model);
  kb::Vector embed(std::string_view text) const override;
  std::string id() const override { return "http:" + model_; }

 private:
  ProviderConfig config_;
  std::string model_;
};

}  // namespace arise::llm
