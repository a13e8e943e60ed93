#include "arise/pipeline/scenario.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "arise/error.hpp"
#include "arise/util/text.hpp"

namespace arise::pipeline {

bool is_scenario_category(std::string_view s) {
  return std::find(kScenarioCategories.begin(), kScenarioCategories.end(), s) != kScenarioCategories.end();
}

std::vector<ScenarioPrompt> parse_prompts(std::string_view content) {
  std::vector<ScenarioPrompt> out;
  std::set<std::string> ids;
  int line_no = 0;
  for (const auto& line : util::split_lines(content)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    auto where = "line " + std::to_string(line_no) + ": ";
    ScenarioPrompt p;
    try {
      auto j = nlohmann::json::parse(line);
      p.id = j.at("id").get<std::string>();
      p.category = j.at("category").get<std::string>();
      p.text = j.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error("prompts.parse_error", where + e.what());
    }
    if (p.id.empty()) throw Error("prompts.parse_error", where + "empty id");
    if (!is_scenario_category(p.category)) throw Error("prompts.parse_error", where + "unknown category '" + p.category + "'");
    if (util::trim(p.text).empty()) throw Error("prompts.parse_error", where + "empty text");
    if (!ids.insert(p.id).second) throw Error("prompts.parse_error", where + "duplicate id '" + p.id + "'");
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ScenarioPrompt> load_prompts(const std::string& path) {
  std::string content;
  try {
    content = util::read_file(path);
  } catch (const Error& e) {
    throw Error("prompts.parse_error", e.what());
  }
  return parse_prompts(content);
}

std::string default_map(std::string_view category) {
  if (category == "right_turn") return "t_junction";
  if (category == "turning_obstacle" || category == "red_light_running" || category == "unprotected_left_turn" ||
      category == "crossing_negotiation")
    return "four_way";
  return "straight";
}

}  // namespace arise::pipeline
