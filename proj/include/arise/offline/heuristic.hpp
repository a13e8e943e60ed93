#pragma once

#include <string>
#include <vector>

#include "arise/llm/provider.hpp"

namespace arise::offline {

/// Deterministic rule-based stand-in for a chat model, so the whole pipeline
/// runs without network access. It reads the same prompts a remote model gets:
/// - extract: routes description clauses to fields by keyword;
/// - snippet: returns the first exemplar;
/// - repair: applies one mechanical fix for the first diagnostic;
/// - evaluate: scores description/script agreement feature by feature.
/// Its answers depend only on the request, so recordings replay exactly.
class HeuristicProvider final : public llm::Provider {
 public:
  explicit HeuristicProvider(std::vector<std::string> map_names = {"four_way", "straight", "t_junction"})
      : maps_(std::move(map_names)) {}
  llm::ChatResponse complete(const llm::ChatRequest& request) override;
  std::string name() const override { return "heuristic"; }

  std::string extract(const std::string& category, const std::string& description) const;
  std::string repair(const std::string& script, const std::string& diagnostics, const std::string& description = {}) const;
  std::string evaluate(const std::string& description, const std::string& script) const;

 private:
  std::vector<std::string> maps_;
};

/// Levenshtein distance, used to pick the closest defined name.
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace arise::offline
