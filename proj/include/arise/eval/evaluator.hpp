#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arise/llm/provider.hpp"

namespace arise::eval {

inline constexpr std::array<std::string_view, 7> kCriteria = {
    "adversarial_type", "behavior", "geometry", "weather", "elements", "spawn", "requirements",
};

struct CriteriaScores {
  std::array<int, 7> scores{};  // indexed like kCriteria
  std::array<std::string, 7> rationale;

  int total() const;
  /// Semantic conformity score in [0, 1].
  double scs() const;
  friend bool operator==(const CriteriaScores&, const CriteriaScores&) = default;
};

/// Strict parse of seven `criterion: score | rationale` lines, each criterion
/// exactly once, scores integers in 0..10. Returns an error description on failure.
struct ScoreParse {
  std::optional<CriteriaScores> value;
  std::string error;
};
ScoreParse parse_scores(std::string_view response);
std::string render_scores(const CriteriaScores& s);

/// Bundled evaluator material: rubric (system turn), condensed DSL reference
/// and scored exemplar pairs.
struct ReferenceMaterial {
  std::string rubric;
  std::string reference;
  struct Exemplar {
    std::string description;
    std::string script;
    CriteriaScores scores;
  };
  std::vector<Exemplar> exemplars;

  static ReferenceMaterial load(const std::string& dir);
  static ReferenceMaterial bundled();
};

/// Leading turns reused by every score call.
struct EvalSession {
  std::vector<llm::Message> priming;
  double temperature = 1.0;
  std::string priming_hash() const;
};

inline constexpr std::string_view kEvalDescriptionHeading = "Description:";
inline constexpr std::string_view kEvalScriptHeading = "Script:";

/// Throws `eval.priming_too_large` when the priming exceeds the token budget.
EvalSession prime(const ReferenceMaterial& material, double temperature, std::size_t token_budget = 8000);

llm::ChatRequest build_score_request(const EvalSession& session, std::string_view description, std::string_view script);

/// One format-reminder retry; `eval.unparseable` when both replies fail.
CriteriaScores score(const EvalSession& session, std::string_view description, std::string_view script,
                     llm::Gateway& llm);

struct ConsistencyStats {
  double min = 0;
  double max = 0;
  double mean = 0;
  double std_pp = 0;  // population standard deviation, percentage points
  std::size_t n = 0;
};

/// Population statistics over SCS percentages. Throws `eval.too_few_samples`
/// for fewer than two values.
ConsistencyStats consistency_stats(const std::vector<double>& percents);

}  // namespace arise::eval
