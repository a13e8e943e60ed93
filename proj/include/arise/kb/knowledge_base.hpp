#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arise/dsl/diagnostic.hpp"
#include "arise/kb/embedding.hpp"

namespace arise::kb {

/// Region labels a KB entry may belong to (every region except `defaults`).
inline constexpr std::array<std::string_view, 7> kCategories = {
    "geometry", "spawn", "adversarial_object", "behavior", "weather", "other_objects", "requirements",
};
bool is_category(std::string_view label);

struct KbEntry {
  std::string id;
  std::string category;
  std::string description;
  std::string snippet;
  Vector embedding;  // unit norm, embedding of `description`
};

struct RetrievalHit {
  const KbEntry* entry = nullptr;
  double score = 0;  // cosine similarity
};

/// Immutable description/snippet store with exhaustive cosine retrieval.
class KnowledgeBase {
 public:
  /// Parses line-delimited records {id, category, description, snippet}.
  /// Throws `kb.parse_error` on malformed lines, unknown categories or duplicate ids.
  static std::vector<KbEntry> parse_records(std::string_view text);

  /// Embeds every description, reading and refreshing the sidecar cache when
  /// `cache_path` is given.
  static KnowledgeBase build(std::vector<KbEntry> entries, std::shared_ptr<const Embedder> embedder,
                             const std::optional<std::string>& cache_path = std::nullopt);
  static KnowledgeBase load(const std::string& path, std::shared_ptr<const Embedder> embedder,
                            const std::optional<std::string>& cache_path = std::nullopt);

  const std::vector<KbEntry>& entries() const { return entries_; }
  const Embedder& embedder() const { return *embedder_; }
  std::size_t category_size(std::string_view category) const;
  const KbEntry* find(std::string_view id) const;

  /// Top-k entries of one category by cosine similarity to the query, in
  /// non-increasing score order with ties broken by insertion order.
  /// Throws `kb.unknown_category`, `kb.bad_k`.
  std::vector<RetrievalHit> retrieve(std::string_view query, std::string_view category, std::size_t k) const;

  /// Content hash over entries and embedder id; changes whenever retrieval could.
  std::string fingerprint() const;

 private:
  std::vector<KbEntry> entries_;
  std::shared_ptr<const Embedder> embedder_;
};

/// Fragment-parses every snippet in its region grammar; `kb.bad_snippet` per failure.
std::vector<dsl::Diagnostic> validate_kb(const KnowledgeBase& kb);

/// Cache key for one description under one embedder.
std::string embedding_cache_key(const Embedder& embedder, std::string_view description);

}  // namespace arise::kb
