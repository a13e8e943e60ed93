#include <gtest/gtest.h>

#include <random>

#include "arise/eval/evaluator.hpp"
#include "arise/offline/heuristic.hpp"
#include "common/records.hpp"
#include "support.hpp"

using namespace arise;
using namespace arise::eval;
using testing_support::error_code;

namespace {

std::string scores_reply(std::array<int, 7> s) {
  CriteriaScores c;
  c.scores = s;
  for (auto& r : c.rationale) r = "because";
  return render_scores(c);
}

llm::Gateway canned(const std::string& reply) {
  return llm::Gateway(std::make_shared<llm::MockProvider>(std::map<llm::Tag, std::string>{{llm::Tag::evaluate, reply}}),
                      "mock");
}

}  // namespace

TEST(Scores, ParseAndRender) {
  auto text = scores_reply({10, 9, 8, 7, 6, 5, 4});
  auto p = parse_scores(text);
  ASSERT_TRUE(p.value) << p.error;
  EXPECT_EQ(p.value->total(), 49);
  EXPECT_EQ(render_scores(*p.value), text);
  EXPECT_TRUE(parse_scores("```\n" + text + "```").value);
}

TEST(Scores, StrictParseRejects) {
  auto text = scores_reply({10, 10, 10, 10, 10, 10, 10});
  EXPECT_FALSE(parse_scores(text.substr(0, text.rfind("requirements"))).value);
  EXPECT_FALSE(parse_scores(text + "weather: 3 | again\n").value);
  std::string over = text;
  over.replace(over.find("behavior: 10"), 12, "behavior: 11");
  EXPECT_FALSE(parse_scores(over).value);
  std::string word = text;
  word.replace(word.find("behavior: 10"), 12, "behavior: ten");
  EXPECT_FALSE(parse_scores(word).value);
  EXPECT_FALSE(parse_scores("Overall a fine script.").value);
}

TEST(Priming, RubricFirstThenReferenceThenExemplars) {
  auto m = ReferenceMaterial::bundled();
  ASSERT_EQ(m.exemplars.size(), 3u);
  auto s = prime(m, 1.0);
  ASSERT_EQ(s.priming.size(), 3 + 2 * m.exemplars.size());
  EXPECT_EQ(s.priming[0].role, llm::Role::system);
  EXPECT_EQ(s.priming[0].content, m.rubric);
  EXPECT_NE(s.priming[1].content.find(m.reference), std::string::npos);
  EXPECT_EQ(s.priming.back().role, llm::Role::assistant);
  EXPECT_EQ(s.priming_hash(), prime(m, 1.0).priming_hash());
  auto other = m;
  other.rubric += " ";
  EXPECT_NE(prime(other, 1.0).priming_hash(), s.priming_hash());
}

TEST(Priming, BudgetIsEnforced) {
  EXPECT_EQ(error_code([] { prime(ReferenceMaterial::bundled(), 1.0, 100); }), "eval.priming_too_large");
}

TEST(Priming, ExemplarsIncludeAPerfectPair) {
  auto m = ReferenceMaterial::bundled();
  EXPECT_TRUE(std::any_of(m.exemplars.begin(), m.exemplars.end(), [](const auto& e) { return e.scores.total() == 70; }));
}

TEST(Score, RequestExtendsThePriming) {
  auto s = prime(ReferenceMaterial::bundled(), 0.3);
  auto r = build_score_request(s, "a description", "model x\n");
  EXPECT_EQ(r.tag, llm::Tag::evaluate);
  EXPECT_DOUBLE_EQ(r.temperature, 0.3);
  ASSERT_EQ(r.messages.size(), s.priming.size() + 1);
  EXPECT_NE(r.messages.back().content.find(kEvalDescriptionHeading), std::string::npos);
  EXPECT_NE(r.messages.back().content.find("a description"), std::string::npos);
}

TEST(Score, FixedMockScoresGiveTableAnchor) {
  auto s = prime(ReferenceMaterial::bundled(), 1.0);
  auto llm = canned(scores_reply({10, 10, 10, 10, 10, 10, 5}));
  auto c = score(s, "d", "s", llm);
  EXPECT_EQ(util::fixed(100 * c.scs(), 2), "92.86");
}

TEST(Score, UnparseableAfterOneRetry) {
  auto s = prime(ReferenceMaterial::bundled(), 1.0);
  auto mock = std::make_shared<llm::MockProvider>(std::map<llm::Tag, std::string>{{llm::Tag::evaluate, "Looks good!"}});
  llm::Gateway llm(mock, "mock");
  EXPECT_EQ(error_code([&] { score(s, "d", "s", llm); }), "eval.unparseable");
  EXPECT_EQ(mock->calls(), 2);
}

TEST(Score, PerfectExemplarReplaysToFullMarks) {
  auto m = ReferenceMaterial::bundled();
  auto s = prime(m, 1.0);
  llm::Gateway llm(std::make_shared<llm::ReplayProvider>(testing_support::data_path("fixtures")), "heuristic");
  std::string description(util::trim(testing_support::read(testing_support::data_path("eval/exemplars/cut_in_rain.txt"))));
  auto script = testing_support::read(testing_support::data_path("eval/exemplars/cut_in_rain.sdsl"));
  auto c = score(s, description, script, llm);
  EXPECT_EQ(c.total(), 70);
  EXPECT_DOUBLE_EQ(c.scs(), 1.0);
}

TEST(Score, ReplayedTranscriptMatchesGolden) {
  auto s = prime(ReferenceMaterial::bundled(), 1.0);
  llm::Gateway llm(std::make_shared<llm::ReplayProvider>(testing_support::data_path("fixtures")), "heuristic");
  auto c = score(s, util::trim(testing_support::read(testing_support::data_path("repair/description.txt"))),
                 testing_support::read(testing_support::data_path("repair/reference.sdsl")), llm);
  EXPECT_EQ(c.scores, (std::array<int, 7>{5, 10, 10, 10, 6, 10, 7}));
}

TEST(Consistency, IdenticalValuesHaveZeroSpread) {
  auto st = consistency_stats(std::vector<double>(10, 100.0 * 65 / 70));
  EXPECT_EQ(util::fixed(st.std_pp, 2), "0.00");
  EXPECT_EQ(st.n, 10u);
  EXPECT_DOUBLE_EQ(st.min, st.max);
}

TEST(Consistency, MatchesTwoPassOracle) {
  std::vector<double> v = {88.57, 92.86, 92.00, 94.29, 90.00, 88.57};
  auto st = consistency_stats(v);
  EXPECT_NEAR(st.std_pp, records::two_pass_std(v), 1e-9);
  EXPECT_DOUBLE_EQ(st.min, 88.57);
  EXPECT_DOUBLE_EQ(st.max, 94.29);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> total(0, 70);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xs(2 + trial % 20);
    for (auto& x : xs) x = 100.0 * total(rng) / 70.0;
    EXPECT_NEAR(consistency_stats(xs).std_pp, records::two_pass_std(xs), 1e-9);
  }
}

TEST(Consistency, SingleValueIsAnError) {
  EXPECT_EQ(error_code([] { consistency_stats({92.86}); }), "eval.too_few_samples");
}
