#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace arise::metrics {

struct Timings {
  double extract_ms = 0;
  double snippets_ms = 0;
  double repair_ms = 0;
  double total_ms = 0;
  friend bool operator==(const Timings&, const Timings&) = default;
};

/// One pipeline execution.
struct RunRecord {
  std::string scenario_id;
  std::string category;
  int run_index = 0;
  bool first_attempt_success = false;
  int repair_attempts = 0;  // A_i, counting the final successful attempt
  bool success = false;
  std::vector<std::string> diagnostics_summary;  // codes of the final diagnostics
  std::string error_code;                         // e.g. trl.exhausted, trl.llm_error
  std::vector<std::string> warnings;              // e.g. snippet.fallback_used:spawn
  Timings timings;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Throws `metrics.bad_record` when the A_i bookkeeping is inconsistent.
void check(const RunRecord& r);

enum class EsrMode { single, total };

struct EsrResult {
  std::map<std::string, double> per_category;
  double average = 0;  // unweighted mean over the reported categories
};

/// Categories present in the records: the scenario categories in canonical
/// order, then any others alphabetically.
std::vector<std::string> categories_of(const std::vector<RunRecord>& records);

/// N_success / N_total per category. mode=single counts first-attempt
/// successes, mode=total counts successes within the repair budget. An empty
/// `categories` reports every category present. Throws
/// `metrics.empty_category` for a requested category without records.
EsrResult esr(const std::vector<RunRecord>& records, EsrMode mode, std::vector<std::string> categories = {});

struct RcrResult {
  std::map<std::string, std::optional<double>> per_category;  // nullopt = N/A
  std::optional<double> average;                             // over defined categories
};

/// Mean A_i over runs that succeeded after at least one repair.
RcrResult rcr(const std::vector<RunRecord>& records, std::vector<std::string> categories = {});

inline constexpr int kMaxCriterionScore = 10;
inline constexpr int kCriteriaCount = 7;

/// Sum of scores over (10 * 7). Throws `metrics.bad_criteria_count` unless
/// exactly seven scores are given and `metrics.bad_score_range` for a score
/// outside [0, 10].
double scs(const std::vector<int>& scores);

double mean(const std::vector<double>& values);
/// Population standard deviation, two-pass.
double population_std(const std::vector<double>& values);

struct ScsStats {
  double min = 0, max = 0, mean = 0, std_pp = 0;
  std::size_t n = 0;
};

struct MetricsReport {
  std::vector<std::string> categories;
  EsrResult esr_single;
  EsrResult esr_total;
  RcrResult rcr;
  std::map<std::string, ScsStats> scs;  // empty when no scores were supplied
};

/// `scs_percents` maps a category to its SCS values in percent.
MetricsReport report(const std::vector<RunRecord>& records,
                     const std::map<std::string, std::vector<double>>& scs_percents = {});

/// Plain-text tables; percentages to 2 decimals rounded half up.
std::string render(const MetricsReport& r);
/// Machine-readable summary.
std::string render_json(const MetricsReport& r);

}  // namespace arise::metrics
