#include "arise/kb/knowledge_base.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "arise/dsl/parser.hpp"
#include "arise/error.hpp"
#include "arise/util/hash.hpp"
#include "arise/util/text.hpp"

namespace arise::kb {

bool is_category(std::string_view label) {
  return std::find(kCategories.begin(), kCategories.end(), label) != kCategories.end();
}

std::vector<KbEntry> KnowledgeBase::parse_records(std::string_view text) {
  std::vector<KbEntry> out;
  std::set<std::string, std::less<>> ids;
  int line_no = 0;
  for (const auto& line : util::split_lines(text)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    auto where = "line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("kb.parse_error", where + ": " + e.what());
    }
    KbEntry entry;
    try {
      entry.id = j.at("id").get<std::string>();
      entry.category = j.at("category").get<std::string>();
      entry.description = j.at("description").get<std::string>();
      entry.snippet = j.at("snippet").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error("kb.parse_error", where + ": " + e.what());
    }
    if (!is_category(entry.category))
      throw Error("kb.parse_error", where + ": unknown category '" + entry.category + "'");
    if (entry.id.empty() || util::trim(entry.description).empty())
      throw Error("kb.parse_error", where + ": id and description must be non-empty");
    if (!ids.insert(entry.id).second) throw Error("kb.parse_error", where + ": duplicate entry id '" + entry.id + "'");
    out.push_back(std::move(entry));
  }
  return out;
}

std::string embedding_cache_key(const Embedder& embedder, std::string_view description) {
  std::string material = embedder.id();
  material += '\0';
  material += description;
  return util::content_hash(material);
}

namespace {

std::map<std::string, Vector> read_cache(const std::string& path) {
  std::map<std::string, Vector> cache;
  std::ifstream in(path);
  if (!in) return cache;
  std::string line;
  while (std::getline(in, line)) {
    try {
      auto j = nlohmann::json::parse(line);
      cache[j.at("key").get<std::string>()] = j.at("vector").get<Vector>();
    } catch (const nlohmann::json::exception&) {
      // A damaged cache line only costs a recomputation.
    }
  }
  return cache;
}

void write_cache(const std::string& path, const std::map<std::string, Vector>& cache) {
  std::string body;
  for (const auto& [key, vec] : cache) body += nlohmann::json{{"key", key}, {"vector", vec}}.dump() + "\n";
  util::write_file(path, body);
}

}  // namespace

KnowledgeBase KnowledgeBase::build(std::vector<KbEntry> entries, std::shared_ptr<const Embedder> embedder,
                                   const std::optional<std::string>& cache_path) {
  std::map<std::string, Vector> cache;
  if (cache_path) cache = read_cache(*cache_path);
  std::map<std::string, Vector> used;
  bool dirty = false;
  for (auto& e : entries) {
    auto key = embedding_cache_key(*embedder, e.description);
    if (auto it = cache.find(key); it != cache.end()) {
      e.embedding = it->second;
    } else {
      e.embedding = embedder->embed(e.description);
      dirty = true;
    }
    used[key] = e.embedding;
  }
  if (cache_path && (dirty || used.size() != cache.size())) write_cache(*cache_path, used);
  KnowledgeBase kb;
  kb.entries_ = std::move(entries);
  kb.embedder_ = std::move(embedder);
  return kb;
}

KnowledgeBase KnowledgeBase::load(const std::string& path, std::shared_ptr<const Embedder> embedder,
                                  const std::optional<std::string>& cache_path) {
  std::string text;
  try {
    text = util::read_file(path);
  } catch (const Error& e) {
    throw Error("kb.parse_error", e.what());
  }
  return build(parse_records(text), std::move(embedder), cache_path);
}

std::size_t KnowledgeBase::category_size(std::string_view category) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [&](const KbEntry& e) { return e.category == category; }));
}

const KbEntry* KnowledgeBase::find(std::string_view id) const {
  for (const auto& e : entries_)
    if (e.id == id) return &e;
  return nullptr;
}

std::vector<RetrievalHit> KnowledgeBase::retrieve(std::string_view query, std::string_view category,
                                                  std::size_t k) const {
  if (!is_category(category)) throw Error("kb.unknown_category", "unknown category '" + std::string(category) + "'");
  if (k < 1) throw Error("kb.bad_k", "k must be at least 1");
  Vector q = embedder_->embed(query);
  std::vector<RetrievalHit> hits;
  for (const auto& e : entries_)
    if (e.category == category) hits.push_back({&e, cosine(q, e.embedding)});
  // Stable sort keeps insertion order among equal scores.
  std::stable_sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) { return a.score > b.score; });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

std::string KnowledgeBase::fingerprint() const {
  std::string material = embedder_->id();
  for (const auto& e : entries_) {
    material += '\n' + e.id + '\x1f' + e.category + '\x1f' + e.description + '\x1f' + e.snippet;
  }
  return util::content_hash(material);
}

std::vector<dsl::Diagnostic> validate_kb(const KnowledgeBase& kb) {
  std::vector<dsl::Diagnostic> out;
  for (const auto& e : kb.entries()) {
    auto parsed = dsl::parse_fragment(e.snippet, e.category);
    if (parsed.ok()) continue;
    const auto& first = parsed.diagnostics.front();
    out.push_back(dsl::compile_error("kb.bad_snippet", "entry '" + e.id + "': " + first.code + ": " + first.message,
                                     first.span.value_or(dsl::SourceSpan{})));
  }
  return out;
}

}  // namespace arise::kb
