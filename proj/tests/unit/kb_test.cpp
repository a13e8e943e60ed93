#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include <json.hpp>

#include "arise/error.hpp"
#include "arise/kb/knowledge_base.hpp"
#include "support.hpp"

using namespace arise;
using namespace arise::kb;
using testing_support::data_path;

namespace {

std::shared_ptr<const Embedder> embedder() {
  static auto e = std::make_shared<const TrigramEmbedder>();
  return e;
}

const KnowledgeBase& bundled() {
  static const KnowledgeBase kb = KnowledgeBase::load(data_path("kb/knowledge_base.jsonl"), embedder());
  return kb;
}

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "none";
}

std::string record(const std::string& id, const std::string& cat, const std::string& desc, const std::string& snip) {
  return nlohmann::json{{"id", id}, {"category", cat}, {"description", desc}, {"snippet", snip}}.dump() + "\n";
}

}  // namespace

TEST(Embedding, UnitNormAndSelfSimilarity) {
  for (const char* t : {"car brakes suddenly", "a", "Nighttime with LIGHT fog!!", "x y z 123"}) {
    auto v = embedder()->embed(t);
    EXPECT_EQ(v.size(), 512u);
    EXPECT_NEAR(l2_norm(v), 1.0, 1e-12);
    EXPECT_NEAR(dot(v, v), 1.0, 1e-12);
    EXPECT_EQ(v, embedder()->embed(t));
  }
}

TEST(Embedding, ParaphraseScoresAboveUnrelated) {
  auto a = embedder()->embed("car brakes suddenly");
  auto b = embedder()->embed("vehicle brakes abruptly");
  auto c = embedder()->embed("sunny weather");
  EXPECT_GT(dot(a, b), dot(a, c));
}

TEST(Embedding, EmptyTextRejected) {
  EXPECT_EQ(code_of([] { embedder()->embed(""); }), "embed.empty_text");
  EXPECT_EQ(code_of([] { embedder()->embed("  ?! "); }), "embed.empty_text");
}

TEST(Embedding, CosineIsSymmetric) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 100; ++i) {
    Vector a(64), b(64);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    EXPECT_NEAR(cosine(a, b), cosine(b, a), 1e-12);
  }
}

TEST(KnowledgeBase, BundledCorpusValidates) {
  const auto& kb = bundled();
  EXPECT_GE(kb.entries().size(), 56u);
  for (auto cat : kCategories) EXPECT_GE(kb.category_size(cat), 8u) << cat;
  auto ds = validate_kb(kb);
  EXPECT_TRUE(ds.empty()) << dsl::render_all(ds);
}

TEST(KnowledgeBase, BadSnippetReported) {
  auto entries = KnowledgeBase::parse_records(record("s1", "spawn", "typo", "adv = new Carr on lane(0)\n"));
  auto kb = KnowledgeBase::build(entries, embedder());
  auto ds = validate_kb(kb);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].code, "kb.bad_snippet");
  EXPECT_NE(ds[0].message.find("s1"), std::string::npos);
}

TEST(KnowledgeBase, ParseErrors) {
  EXPECT_EQ(code_of([] {
              KnowledgeBase::parse_records(record("a", "weather", "x", "param w = 1\n") +
                                           record("a", "weather", "y", "param w = 2\n"));
            }),
            "kb.parse_error");
  EXPECT_EQ(code_of([] { KnowledgeBase::parse_records("{not json\n"); }), "kb.parse_error");
  EXPECT_EQ(code_of([] { KnowledgeBase::parse_records(record("a", "defaults", "x", "param w = 1\n")); }),
            "kb.parse_error");
  EXPECT_EQ(code_of([] { KnowledgeBase::load("/nonexistent/kb.jsonl", embedder()); }), "kb.parse_error");
}

TEST(KnowledgeBase, SelfRetrievalRanksFirst) {
  const auto& kb = bundled();
  for (const auto& e : kb.entries()) {
    auto hits = kb.retrieve(e.description, e.category, 2);
    ASSERT_FALSE(hits.empty());
    EXPECT_EQ(hits[0].entry->id, e.id);
    EXPECT_NEAR(hits[0].score, 1.0, 1e-12);
  }
}

TEST(KnowledgeBase, TruncatesToCategorySize) {
  auto kb = KnowledgeBase::build(KnowledgeBase::parse_records(record("only", "weather", "rain", "param w = 1\n") +
                                                              record("g", "geometry", "road", "model m\n")),
                                 embedder());
  EXPECT_EQ(kb.retrieve("rain", "weather", 2).size(), 1u);
  EXPECT_EQ(code_of([&] { kb.retrieve("rain", "sky", 2); }), "kb.unknown_category");
  EXPECT_EQ(code_of([&] { kb.retrieve("rain", "weather", 0); }), "kb.bad_k");
}

TEST(KnowledgeBase, MatchesExhaustiveScanOracle) {
  const auto& kb = bundled();
  std::mt19937_64 rng(2024);
  std::vector<std::string> words;
  for (const auto& e : kb.entries()) {
    std::string w;
    for (char c : e.description + " ") {
      if (c == ' ') {
        if (!w.empty()) words.push_back(w);
        w.clear();
      } else {
        w += c;
      }
    }
  }
  for (int q = 0; q < 100; ++q) {
    std::string query;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 6); i < n; ++i) query += words[rng() % words.size()] + " ";
    auto cat = std::string(kCategories[rng() % kCategories.size()]);
    std::size_t k = 1 + rng() % 4;

    // Oracle: score everything, then pick best remaining with lowest index.
    auto qv = embedder()->embed(query);
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = 0; i < kb.entries().size(); ++i) {
      const auto& e = kb.entries()[i];
      if (e.category != cat) continue;
      double s = 0, na = 0, nb = 0;
      for (std::size_t d = 0; d < qv.size(); ++d) {
        s += qv[d] * e.embedding[d];
        na += qv[d] * qv[d];
        nb += e.embedding[d] * e.embedding[d];
      }
      scored.push_back({s / (std::sqrt(na) * std::sqrt(nb)), i});
    }
    std::vector<std::size_t> expected;
    std::vector<bool> taken(scored.size(), false);
    for (std::size_t r = 0; r < std::min(k, scored.size()); ++r) {
      std::size_t best = scored.size();
      for (std::size_t i = 0; i < scored.size(); ++i)
        if (!taken[i] && (best == scored.size() || scored[i].first > scored[best].first)) best = i;
      taken[best] = true;
      expected.push_back(scored[best].second);
    }

    auto hits = kb.retrieve(query, cat, k);
    ASSERT_EQ(hits.size(), expected.size()) << query;
    for (std::size_t r = 0; r < hits.size(); ++r) {
      EXPECT_EQ(hits[r].entry, &kb.entries()[expected[r]]) << query << " rank " << r;
      EXPECT_EQ(hits[r].entry->category, cat);
      if (r) EXPECT_GE(hits[r - 1].score, hits[r].score);
    }
  }
}

TEST(KnowledgeBase, TiesBreakByInsertionOrder) {
  auto kb = KnowledgeBase::build(KnowledgeBase::parse_records(record("first", "weather", "rain", "param w = 1\n") +
                                                              record("second", "weather", "rain", "param w = 2\n")),
                                 embedder());
  auto hits = kb.retrieve("rain", "weather", 2);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].entry->id, "first");
  EXPECT_EQ(hits[1].entry->id, "second");
}

TEST(KnowledgeBase, CacheIsCoherent) {
  testing_support::TempDir tmp;
  auto cache = tmp.str("kb.cache.jsonl");
  auto first = KnowledgeBase::load(data_path("kb/knowledge_base.jsonl"), embedder(), cache);
  ASSERT_TRUE(std::filesystem::exists(cache));
  auto second = KnowledgeBase::load(data_path("kb/knowledge_base.jsonl"), embedder(), cache);
  for (std::size_t i = 0; i < second.entries().size(); ++i) {
    const auto& e = second.entries()[i];
    EXPECT_EQ(e.embedding, embedder()->embed(e.description)) << e.id;
    EXPECT_EQ(e.embedding, first.entries()[i].embedding);
  }
  EXPECT_EQ(first.fingerprint(), second.fingerprint());
}
