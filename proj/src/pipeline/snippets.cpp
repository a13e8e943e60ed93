#include "arise/pipeline/snippets.hpp"

#include "arise/dsl/ast.hpp"
#include "arise/dsl/diagnostic.hpp"
#include "arise/dsl/parser.hpp"
#include "arise/error.hpp"
#include "arise/util/text.hpp"

namespace arise::pipeline {

namespace {

constexpr std::string_view kRegionMarker = "#-- region: ";

constexpr std::string_view kSystem =
    "You write code snippets for one region of a traffic scenario script. The scripting language is a "
    "Scenic-like DSL: `param NAME = value`, `name = new Kind <placement> with behavior B(args)`, "
    "`behavior Name(arg: type):` blocks with `do action(...)` and `interrupt when cond:` clauses, and "
    "`require cond`. The adversarial agent is always named `adv` and the ego vehicle `ego`.\n"
    "Adapt the examples to the requested description, keep their naming conventions, and reply with only the "
    "snippet inside one ``` fenced block.";

std::string with_newline(std::string_view text) {
  std::string out(text);
  while (!out.empty() && (out.back() == '\n' || out.back() == ' ' || out.back() == '\r')) out.pop_back();
  if (!out.empty()) out.push_back('\n');
  return out;
}

std::optional<dsl::Diagnostic> fragment_error(std::string_view snippet, std::string_view region) {
  auto parsed = dsl::parse_fragment(snippet, region);
  if (parsed.ok()) return std::nullopt;
  return parsed.diagnostics.front();
}

}  // namespace

SnippetSet split_regions(std::string_view source) {
  SnippetSet out;
  std::string current;
  bool inside = false;
  std::string body;
  for (const auto& line : util::split_lines(source)) {
    if (line.rfind(kRegionMarker, 0) == 0) {
      if (inside) out[current] = with_newline(body);
      current = std::string(util::trim(std::string_view(line).substr(kRegionMarker.size())));
      body.clear();
      inside = true;
      continue;
    }
    if (inside) body += line + "\n";
  }
  if (inside) out[current] = with_newline(body);
  return out;
}

Defaults Defaults::load(const std::string& path) {
  Defaults d;
  d.regions = split_regions(util::read_file(path));
  for (auto label : dsl::kRegionOrder)
    if (!d.regions.count(label)) throw Error("pipeline.bad_defaults", "defaults file lacks region '" + std::string(label) + "'");
  return d;
}

Defaults Defaults::bundled() { return load(std::string(ARISE_DATA_DIR) + "/pipeline/defaults.sdsl"); }

std::string geometry_for_map(std::string_view map) {
  return "param map = \"" + std::string(map) + "\"\nmodel arise.kinematic\n";
}

std::string assemble(const SnippetSet& snippets, const Defaults& defaults, std::string_view map_hint) {
  std::string out;
  bool first = true;
  for (auto label : dsl::kRegionOrder) {
    std::string body;
    if (auto it = snippets.find(label); it != snippets.end()) {
      body = with_newline(it->second);
    } else if (label == "geometry") {
      body = geometry_for_map(map_hint);
    } else if (auto d = defaults.regions.find(label); d != defaults.regions.end()) {
      body = d->second;
    }
    if (!first) out += "\n";
    first = false;
    out += std::string(kRegionMarker) + std::string(label) + "\n" + body;
  }
  return out;
}

llm::ChatRequest build_snippet_request(std::string_view region, std::string_view field_text,
                                       const std::vector<kb::RetrievalHit>& exemplars, double temperature) {
  llm::ChatRequest r;
  r.tag = llm::Tag::snippet;
  r.temperature = temperature;
  r.messages.push_back({llm::Role::system, std::string(kSystem)});
  std::string user = "Region: " + std::string(region) + "\n\n";
  int n = 0;
  for (const auto& hit : exemplars) {
    user += std::string(kExemplarMarker) + std::to_string(++n) + "\nDescription: " + hit.entry->description +
            "\nSnippet:\n```\n" + with_newline(hit.entry->snippet) + "```\n\n";
  }
  user += "Write the snippet for this description.\nDescription: " + std::string(field_text) + "\nSnippet:";
  r.messages.push_back({llm::Role::user, std::move(user)});
  return r;
}

std::string clean_snippet(std::string_view reply) { return with_newline(util::strip_code_fence(reply)); }

SnippetOutcome generate_snippets(const SemanticDecomposition& decomposition, const kb::KnowledgeBase& kb,
                                 llm::Gateway& llm, std::size_t k, double temperature) {
  SnippetOutcome out;
  for (auto region : dsl::kRegionOrder) {
    auto text = decomposition.field(region);
    if (!text) continue;
    auto hits = kb.retrieve(*text, region, k);
    if (hits.empty()) continue;

    auto request = build_snippet_request(region, *text, hits, temperature);
    auto reply = llm.complete(request);
    auto snippet = clean_snippet(reply.content);
    auto error = fragment_error(snippet, region);
    if (error) {
      request.messages.push_back({llm::Role::assistant, reply.content});
      request.messages.push_back({llm::Role::user, "The snippet does not parse:\n" + dsl::render(*error, snippet) +
                                                       "\nReply with only the corrected snippet in one fenced block."});
      snippet = clean_snippet(llm.complete(request).content);
      error = fragment_error(snippet, region);
    }
    if (error) {
      snippet = hits.front().entry->snippet;
      out.fallbacks.emplace_back(region);
    }
    out.snippets[std::string(region)] = snippet;
  }
  return out;
}

}  // namespace arise::pipeline
