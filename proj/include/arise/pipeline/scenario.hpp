#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace arise::pipeline {

inline constexpr std::array<std::string_view, 8> kScenarioCategories = {
    "straight_obstacle",     "turning_obstacle", "lane_changing", "vehicle_passing", "red_light_running",
    "unprotected_left_turn", "right_turn",       "crossing_negotiation",
};

bool is_scenario_category(std::string_view s);

struct ScenarioPrompt {
  std::string id;
  std::string category;
  std::string text;
};

/// Parses line-delimited {id, category, text} records. Throws
/// `prompts.parse_error` on malformed lines, unknown categories, empty text or
/// duplicate ids.
std::vector<ScenarioPrompt> parse_prompts(std::string_view content);
std::vector<ScenarioPrompt> load_prompts(const std::string& path);

/// Map used when the script names none: intersection maps for categories that
/// happen at junctions, the straight road otherwise.
std::string default_map(std::string_view category);

}  // namespace arise::pipeline
