#include "arise/eval/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include <json.hpp>

#include "arise/error.hpp"
#include "arise/metrics/metrics.hpp"
#include "arise/util/hash.hpp"
#include "arise/util/text.hpp"

namespace arise::eval {

namespace {

std::optional<std::size_t> criterion_index(std::string_view name) {
  auto it = std::find(kCriteria.begin(), kCriteria.end(), name);
  if (it == kCriteria.end()) return std::nullopt;
  return static_cast<std::size_t>(it - kCriteria.begin());
}

std::string pair_turn(std::string_view description, std::string_view script) {
  std::string body(script);
  if (!body.empty() && body.back() != '\n') body.push_back('\n');
  return std::string(kEvalDescriptionHeading) + "\n" + std::string(description) + "\n\n" +
         std::string(kEvalScriptHeading) + "\n```\n" + body + "```\n\nScore this pair.";
}

}  // namespace

int CriteriaScores::total() const { return std::accumulate(scores.begin(), scores.end(), 0); }

double CriteriaScores::scs() const { return metrics::scs(std::vector<int>(scores.begin(), scores.end())); }

ScoreParse parse_scores(std::string_view response) {
  std::string body = response.find("```") != std::string_view::npos ? util::strip_code_fence(response)
                                                                      : std::string(response);
  CriteriaScores s;
  std::array<bool, 7> seen{};
  for (const auto& raw : util::split_lines(body)) {
    auto line = util::trim(raw);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) return {std::nullopt, "line without `criterion:` prefix: " + std::string(line)};
    auto name = util::to_lower(util::trim(line.substr(0, colon)));
    auto idx = criterion_index(name);
    if (!idx) return {std::nullopt, "unknown criterion '" + name + "'"};
    if (seen[*idx]) return {std::nullopt, "criterion '" + name + "' appears twice"};
    seen[*idx] = true;
    auto rest = util::trim(line.substr(colon + 1));
    auto bar = rest.find('|');
    auto number = util::trim(rest.substr(0, bar));
    int value = -1;
    if (number.empty() || number.size() > 2 || !std::all_of(number.begin(), number.end(), [](char c) { return c >= '0' && c <= '9'; }))
      return {std::nullopt, "score for '" + name + "' is not an integer"};
    value = std::stoi(std::string(number));
    if (value > 10) return {std::nullopt, "score for '" + name + "' exceeds 10"};
    s.scores[*idx] = value;
    if (bar != std::string_view::npos) s.rationale[*idx] = std::string(util::trim(rest.substr(bar + 1)));
  }
  for (std::size_t i = 0; i < kCriteria.size(); ++i)
    if (!seen[i]) return {std::nullopt, "missing criterion '" + std::string(kCriteria[i]) + "'"};
  return {s, {}};
}

std::string render_scores(const CriteriaScores& s) {
  std::string out;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    out += std::string(kCriteria[i]) + ": " + std::to_string(s.scores[i]);
    if (!s.rationale[i].empty()) out += " | " + s.rationale[i];
    out += "\n";
  }
  return out;
}

ReferenceMaterial ReferenceMaterial::load(const std::string& dir) {
  ReferenceMaterial m;
  m.rubric = util::read_file(dir + "/rubric.md");
  m.reference = util::read_file(dir + "/reference.md");
  int line_no = 0;
  for (const auto& line : util::split_lines(util::read_file(dir + "/exemplars.jsonl"))) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Exemplar e;
      e.description = j.at("description").get<std::string>();
      e.script = util::read_file(dir + "/" + j.at("script").get<std::string>());
      auto parsed = parse_scores(j.at("scores").get<std::string>());
      if (!parsed.value) throw Error("eval.bad_material", parsed.error);
      e.scores = *parsed.value;
      m.exemplars.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw Error("eval.bad_material", "exemplars.jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return m;
}

ReferenceMaterial ReferenceMaterial::bundled() { return load(std::string(ARISE_DATA_DIR) + "/eval"); }

std::string EvalSession::priming_hash() const {
  std::string all;
  for (const auto& m : priming) all += std::string(llm::to_string(m.role)) + '\0' + m.content + '\0';
  return util::content_hash(all);
}

EvalSession prime(const ReferenceMaterial& material, double temperature, std::size_t token_budget) {
  EvalSession s;
  s.temperature = temperature;
  s.priming.push_back({llm::Role::system, material.rubric});
  s.priming.push_back({llm::Role::user, "Condensed language reference:\n\n" + material.reference});
  s.priming.push_back({llm::Role::assistant, "Understood."});
  for (const auto& e : material.exemplars) {
    s.priming.push_back({llm::Role::user, pair_turn(e.description, e.script)});
    s.priming.push_back({llm::Role::assistant, render_scores(e.scores)});
  }
  std::size_t tokens = 0;
  for (const auto& m : s.priming) tokens += llm::approx_tokens(m.content);
  if (tokens > token_budget)
    throw Error("eval.priming_too_large", "priming needs about " + std::to_string(tokens) + " tokens, budget is " +
                                              std::to_string(token_budget));
  return s;
}

llm::ChatRequest build_score_request(const EvalSession& session, std::string_view description, std::string_view script) {
  llm::ChatRequest r;
  r.tag = llm::Tag::evaluate;
  r.temperature = session.temperature;
  r.messages = session.priming;
  r.messages.push_back({llm::Role::user, pair_turn(description, script)});
  return r;
}

CriteriaScores score(const EvalSession& session, std::string_view description, std::string_view script,
                     llm::Gateway& llm) {
  auto request = build_score_request(session, description, script);
  auto first = llm.complete(request);
  auto parsed = parse_scores(first.content);
  if (parsed.value) return *parsed.value;
  request.messages.push_back({llm::Role::assistant, first.content});
  request.messages.push_back({llm::Role::user, "Your reply could not be parsed (" + parsed.error +
                                                   "). Reply with exactly seven lines `criterion: score | "
                                                   "rationale`, one per criterion, scores 0 to 10."});
  auto reparsed = parse_scores(llm.complete(request).content);
  if (reparsed.value) return *reparsed.value;
  throw Error("eval.unparseable", "evaluator reply failed to parse twice: " + reparsed.error);
}

ConsistencyStats consistency_stats(const std::vector<double>& percents) {
  if (percents.size() < 2)
    throw Error("eval.too_few_samples", "consistency statistics need at least 2 values, got " + std::to_string(percents.size()));
  ConsistencyStats s;
  s.n = percents.size();
  auto [lo, hi] = std::minmax_element(percents.begin(), percents.end());
  s.min = *lo;
  s.max = *hi;
  s.mean = metrics::mean(percents);
  s.std_pp = metrics::population_std(percents);
  return s;
}

}  // namespace arise::eval
