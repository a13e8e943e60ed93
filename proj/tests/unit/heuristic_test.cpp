#include <gtest/gtest.h>

#include <filesystem>

#include "arise/eval/evaluator.hpp"
#include "arise/exec/validate.hpp"
#include "arise/offline/heuristic.hpp"
#include "arise/offline/oracle.hpp"
#include "arise/pipeline/extract.hpp"
#include "arise/repair/trl.hpp"
#include "common/faults.hpp"
#include "support.hpp"

using namespace arise;
using namespace arise::offline;

namespace {

std::shared_ptr<const exec::MapSet> maps() {
  static auto m = std::make_shared<const exec::MapSet>(exec::MapSet::load_dir(testing_support::data_path("maps")));
  return m;
}

}  // namespace

TEST(Heuristic, ExtractionAlwaysParses) {
  HeuristicProvider h;
  for (const auto& p : pipeline::load_prompts(testing_support::data_path("prompts/scenarios.jsonl"))) {
    auto parsed = pipeline::parse_extraction(h.extract(p.category, p.text), p.category);
    EXPECT_TRUE(parsed.value) << p.id << ": " << parsed.error;
  }
}

TEST(Heuristic, AnswersDependOnlyOnTheRequest) {
  HeuristicProvider a, b;
  auto request = pipeline::build_extraction_request({"x", "right_turn", "A cyclist turns right in the rain."}, 1.0);
  EXPECT_EQ(a.complete(request).content, b.complete(request).content);
  EXPECT_EQ(a.complete(request).content, a.complete(request).content);
}

TEST(Heuristic, RepairsEachMechanicalFaultClass) {
  exec::BuiltinValidator v(maps());
  llm::Gateway llm(std::make_shared<HeuristicProvider>(), "heuristic");
  std::map<std::string, std::string> texts;
  for (const auto& p : pipeline::load_prompts(testing_support::data_path("prompts/scenarios.jsonl"))) texts[p.id] = p.text;
  for (const auto& path : testing_support::seed_paths()) {
    auto seed = testing_support::read(path);
    auto description = texts.at(std::filesystem::path(path).stem().string());
    for (auto f : faults::kAll) {
      std::string broken;
      try {
        broken = faults::inject(seed, f);
      } catch (const std::runtime_error&) {
        continue;
      }
      auto out = repair::run_trl(broken, description, v, {}, llm, {});
      EXPECT_TRUE(out.success) << path << " " << faults::expected_code(f);
    }
  }
}

TEST(Heuristic, EvaluationIsWellFormed) {
  HeuristicProvider h;
  auto m = eval::ReferenceMaterial::bundled();
  for (const auto& e : m.exemplars) EXPECT_TRUE(eval::parse_scores(h.evaluate(e.description, e.script)).value);
  EXPECT_EQ(eval::parse_scores(h.evaluate(m.exemplars[0].description, m.exemplars[0].script)).value->total(), 70);
}

TEST(Heuristic, EditDistance) {
  EXPECT_EQ(edit_distance("kitten", "sitting"), 3u);
  EXPECT_EQ(edit_distance("", "abc"), 3u);
  EXPECT_EQ(edit_distance("same", "same"), 0u);
}

TEST(Oracle, RestoresOnlyTheFirstDiagnosedLine) {
  std::string ref = "a\nb\nc\n";
  std::string cur = "a\nX\nY\n";
  EXPECT_EQ(restore_first_diagnosed_line(cur, "[compile/sem.x] m @ 3:1\n[compile/sem.x] m @ 2:1\n", ref), "a\nX\nc\n");
  EXPECT_EQ(restore_first_diagnosed_line(cur, "no location here", ref), cur);
}
