#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "arise/kb/knowledge_base.hpp"
#include "arise/llm/provider.hpp"
#include "arise/pipeline/extract.hpp"

namespace arise::pipeline {

/// Snippet text per region label. A missing region takes its default.
using SnippetSet = std::map<std::string, std::string, std::less<>>;

/// Splits region-marked source into region bodies. Text before the first
/// marker is dropped.
SnippetSet split_regions(std::string_view source);

/// Canonical component values used where the pipeline generated nothing.
struct Defaults {
  SnippetSet regions;
  static Defaults load(const std::string& path);
  static Defaults bundled();
};

/// Geometry body for a map name.
std::string geometry_for_map(std::string_view map);

/// Region scaffolding in canonical order. Geometry falls back to the map hint,
/// every other region to its default body.
std::string assemble(const SnippetSet& snippets, const Defaults& defaults, std::string_view map_hint);

/// Marker preceding each exemplar in a snippet prompt.
inline constexpr std::string_view kExemplarMarker = "### Example ";

llm::ChatRequest build_snippet_request(std::string_view region, std::string_view field_text,
                                       const std::vector<kb::RetrievalHit>& exemplars, double temperature);

/// Normalises a model reply to snippet text: fence stripped, one trailing newline.
std::string clean_snippet(std::string_view reply);

struct SnippetOutcome {
  SnippetSet snippets;
  /// Regions that fell back to the rank-1 retrieved snippet (`snippet.fallback_used`).
  std::vector<std::string> fallbacks;
};

/// Retrieves k exemplars per populated field and asks the model for a snippet
/// in that region. A snippet that fails fragment parsing is reprompted once
/// with the parser diagnostic, then replaced by the rank-1 KB snippet.
SnippetOutcome generate_snippets(const SemanticDecomposition& decomposition, const kb::KnowledgeBase& kb,
                                 llm::Gateway& llm, std::size_t k, double temperature);

}  // namespace arise::pipeline
