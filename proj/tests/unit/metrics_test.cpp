#include <gtest/gtest.h>

#include <cmath>
#include <regex>

#include <json.hpp>

#include "arise/metrics/metrics.hpp"
#include "arise/metrics/run_log.hpp"
#include "common/records.hpp"
#include "support.hpp"

using namespace arise;
using namespace arise::metrics;
using testing_support::error_code;

namespace {

RunRecord rec(std::string category, bool first, bool success, int repairs) {
  RunRecord r;
  r.category = std::move(category);
  r.scenario_id = r.category + "_1";
  r.first_attempt_success = first;
  r.success = success;
  r.repair_attempts = repairs;
  return r;
}

std::vector<RunRecord> n_of(int successes, int total, const std::string& category = "straight_obstacle") {
  std::vector<RunRecord> out;
  for (int i = 0; i < total; ++i) out.push_back(i < successes ? rec(category, false, true, 1) : rec(category, false, false, 10));
  return out;
}

}  // namespace

TEST(Esr, DirectRatio) {
  EXPECT_DOUBLE_EQ(esr(n_of(7, 10), EsrMode::total).per_category.at("straight_obstacle"), 0.7);
  EXPECT_DOUBLE_EQ(esr(n_of(0, 10), EsrMode::total).average, 0.0);
  EXPECT_DOUBLE_EQ(esr(n_of(10, 10), EsrMode::total).average, 1.0);
}

TEST(Esr, TableAnchor) {
  auto log = n_of(241, 250);
  EXPECT_EQ(util::fixed(esr(log, EsrMode::total).per_category.at("straight_obstacle"), 3), "0.964");
  EXPECT_DOUBLE_EQ(esr(log, EsrMode::total).per_category.at("straight_obstacle"), 241.0 / 250.0);
}

TEST(Esr, SingleCountsFirstAttemptOnly) {
  std::vector<RunRecord> log = {rec("right_turn", true, true, 0), rec("right_turn", false, true, 2),
                                rec("right_turn", false, false, 10), rec("right_turn", true, true, 0)};
  EXPECT_DOUBLE_EQ(esr(log, EsrMode::single).average, 0.5);
  EXPECT_DOUBLE_EQ(esr(log, EsrMode::total).average, 0.75);
}

TEST(Esr, AverageIsUnweightedOverCategories) {
  auto log = n_of(1, 1, "right_turn");
  auto more = n_of(0, 9, "lane_changing");
  log.insert(log.end(), more.begin(), more.end());
  EXPECT_DOUBLE_EQ(esr(log, EsrMode::total).average, 0.5);
}

TEST(Esr, EmptyRequestedCategoryIsAnError) {
  EXPECT_EQ(error_code([] { esr(n_of(1, 2), EsrMode::total, {"right_turn"}); }), "metrics.empty_category");
}

TEST(Esr, TotalDominatesSingleOnRandomLogs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto log = records::random_log(500, seed);
    auto s = esr(log, EsrMode::single), t = esr(log, EsrMode::total);
    for (const auto& [c, v] : s.per_category) EXPECT_GE(t.per_category.at(c), v);
    EXPECT_GE(t.average, s.average);
  }
}

TEST(Rcr, ArithmeticMeanOfQualifyingRuns) {
  std::vector<RunRecord> log = {rec("right_turn", false, true, 2), rec("right_turn", false, true, 3),
                                rec("right_turn", false, true, 4), rec("right_turn", true, true, 0),
                                rec("right_turn", false, false, 10)};
  EXPECT_DOUBLE_EQ(*rcr(log).per_category.at("right_turn"), 3.0);
}

TEST(Rcr, NotApplicableWithoutQualifyingRuns) {
  std::vector<RunRecord> first = {rec("right_turn", true, true, 0), rec("right_turn", true, true, 0)};
  EXPECT_FALSE(rcr(first).per_category.at("right_turn").has_value());
  std::vector<RunRecord> failed = {rec("right_turn", false, false, 10)};
  EXPECT_FALSE(rcr(failed).per_category.at("right_turn").has_value());
  EXPECT_FALSE(rcr(failed).average.has_value());
}

TEST(Rcr, AverageSkipsUndefinedCategories) {
  std::vector<RunRecord> log = {rec("right_turn", false, true, 2), rec("lane_changing", true, true, 0),
                                rec("vehicle_passing", false, true, 4)};
  EXPECT_DOUBLE_EQ(*rcr(log).average, 3.0);
}

TEST(Rcr, ExcludedRunsNeverChangeTheValue) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto log = records::random_log(300, seed);
    auto before = rcr(log);
    auto extended = log;
    for (int i = 0; i < 50; ++i) {
      extended.push_back(rec(log[i].category, true, true, 0));
      extended.push_back(rec(log[i].category, false, false, 10));
    }
    auto after = rcr(extended);
    EXPECT_EQ(before.per_category, after.per_category);
  }
}

TEST(Metrics, MatchBruteForce) {
  auto log = records::random_log(2000, 42);
  auto o = records::brute_force(log);
  auto s = esr(log, EsrMode::single), t = esr(log, EsrMode::total);
  auto r = rcr(log);
  for (const auto& [c, v] : o.esr_single) {
    EXPECT_NEAR(s.per_category.at(c), v, 1e-12);
    EXPECT_NEAR(t.per_category.at(c), o.esr_total.at(c), 1e-12);
    ASSERT_EQ(r.per_category.at(c).has_value(), o.rcr.at(c).has_value());
    if (o.rcr.at(c)) EXPECT_NEAR(*r.per_category.at(c), *o.rcr.at(c), 1e-12);
  }
}

TEST(Metrics, RecordConsistencyIsChecked) {
  EXPECT_EQ(error_code([] { check(rec("right_turn", true, true, 2)); }), "metrics.bad_record");
  EXPECT_EQ(error_code([] { check(rec("right_turn", false, true, 0)); }), "metrics.bad_record");
  EXPECT_EQ(error_code([] { check(rec("right_turn", false, false, -1)); }), "metrics.bad_record");
}

TEST(Scs, PublishedAnchors) {
  EXPECT_DOUBLE_EQ(scs({10, 10, 10, 10, 10, 10, 10}), 1.0);
  EXPECT_EQ(util::fixed(100 * scs({10, 10, 10, 10, 10, 10, 5}), 2), "92.86");
  EXPECT_EQ(util::fixed(100 * scs({10, 10, 10, 8, 8, 8, 8}), 2), "88.57");
  EXPECT_DOUBLE_EQ(scs({0, 0, 0, 0, 0, 0, 0}), 0.0);
}

TEST(Scs, RejectsBadInput) {
  EXPECT_EQ(error_code([] { scs({10, 10}); }), "metrics.bad_criteria_count");
  EXPECT_EQ(error_code([] { scs({10, 10, 10, 10, 10, 10, 11}); }), "metrics.bad_score_range");
  EXPECT_EQ(error_code([] { scs({10, 10, 10, 10, 10, 10, -1}); }), "metrics.bad_score_range");
}

TEST(Stats, PopulationStdMatchesTwoPass) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(50, 100);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(2 + trial);
    for (auto& x : v) x = d(rng);
    EXPECT_NEAR(population_std(v), records::two_pass_std(v), 1e-9);
  }
  EXPECT_EQ(population_std(std::vector<double>(10, 92.86)), 0.0);
}

TEST(Report, TableLayout) {
  std::vector<RunRecord> log = {rec("right_turn", true, true, 0), rec("right_turn", false, true, 3),
                                rec("lane_changing", false, false, 10)};
  auto text = render(report(log, {{"right_turn", {94.29, 88.57}}}));
  EXPECT_TRUE(std::regex_search(text, std::regex(R"(right_turn +50\.00% +100\.00% +3\.00)"))) << text;
  EXPECT_NE(text.find("N/A"), std::string::npos);
  EXPECT_TRUE(std::regex_search(text, std::regex(R"(right_turn +88\.57 +94\.29 +91\.43 +2\.86 +2)"))) << text;
}

TEST(Report, EmptyScsOmitsSection) {
  auto text = render(report({rec("right_turn", true, true, 0)}));
  EXPECT_EQ(text.find("SCS"), std::string::npos);
  EXPECT_NE(text.find("ESR"), std::string::npos);
  EXPECT_NE(text.find("RCR"), std::string::npos);
}

TEST(Report, RoundsHalfUp) {
  EXPECT_EQ(util::fixed(0.125, 2), "0.13");
  EXPECT_EQ(util::fixed(92.857142857, 2), "92.86");
  EXPECT_EQ(util::fixed(2.5, 0), "3");
}

TEST(RunLog, RoundTripAndOrdering) {
  testing_support::TempDir dir;
  auto log = records::random_log(40, 3);
  {
    RunLogWriter w(dir.str("runs.jsonl"), {{"runs", 5}});
    for (std::size_t i = log.size(); i-- > 0;) w.submit(i, log[i]);
    EXPECT_EQ(w.written(), log.size());
  }
  auto back = read_run_log(dir.str("runs.jsonl"));
  EXPECT_EQ(back.records, log);
  EXPECT_EQ(back.header["config"]["runs"], 5);
}

TEST(RunLog, TimestampsAreStripped) {
  auto a = R"({"schema":"arise-runlog/1","created":"2026-01-01T00:00:00Z","config":{}})" "\n"
           R"({"scenario_id":"x","category":"right_turn","run_index":0,"first_attempt_success":true,"repair_attempts":0,"success":true,"diagnostics_summary":[],"error_code":"","warnings":[],"timings":{"total_ms":3.5}})" "\n";
  auto b = R"({"schema":"arise-runlog/1","created":"2027-01-01T00:00:00Z","config":{}})" "\n"
           R"({"scenario_id":"x","category":"right_turn","run_index":0,"first_attempt_success":true,"repair_attempts":0,"success":true,"diagnostics_summary":[],"error_code":"","warnings":[],"timings":{"total_ms":9.0}})" "\n";
  EXPECT_EQ(without_timestamps(a), without_timestamps(b));
  EXPECT_NE(std::string(a), std::string(b));
}

TEST(RunLog, ForeignSchemaIsRejected) {
  EXPECT_EQ(error_code([] { parse_run_log(R"({"schema":"other/1"})" "\n"); }), "metrics.bad_log");
  EXPECT_EQ(error_code([] { parse_run_log(R"({"schema":"arise-runlog/1"})" "\n{bad\n"); }), "metrics.bad_log");
}
