#include "arise/pipeline/extract.hpp"

#include <algorithm>
#include <map>

#include "arise/error.hpp"
#include "arise/util/text.hpp"

namespace arise::pipeline {

namespace {

constexpr std::string_view kSystem =
    "You decompose natural-language traffic scenario descriptions into semantic components for a scenario "
    "scripting language.\n"
    "Reply with exactly seven lines, one per field, in this order:\n"
    "behavior, geometry, spawn, adversarial_object, requirements, other_objects, weather.\n"
    "Each line has the form `field: value`, where the value is a short phrase taken from the description.\n"
    "behavior: what the adversarial agent does.\n"
    "geometry: the road layout.\n"
    "spawn: where the adversarial agent starts relative to the ego vehicle.\n"
    "adversarial_object: the type of the adversarial agent.\n"
    "requirements: explicit constraints such as speed limits, distances or lane keeping.\n"
    "other_objects: traffic participants or objects other than the ego vehicle and the adversary.\n"
    "weather: weather and lighting conditions.\n"
    "Write `none` for requirements, other_objects or weather when the description gives no cue for them. "
    "Do not write anything else.";

struct Shot {
  std::string_view category;
  std::string_view description;
  std::string_view answer;
};

constexpr Shot kShots[] = {
    {"straight_obstacle",
     "On a wet road after the rain stopped, a broken-down truck blocks the lane ahead of the ego vehicle while "
     "several vehicles are parked along the roadside.",
     "behavior: the truck stays stopped and does not move\n"
     "geometry: a straight road\n"
     "spawn: a truck blocking the lane ahead of the ego vehicle\n"
     "adversarial_object: a broken-down truck\n"
     "requirements: none\n"
     "other_objects: several vehicles parked along the roadside\n"
     "weather: a wet road after the rain stopped"},
    {"unprotected_left_turn",
     "The ego vehicle turns left at a crossroads while an oncoming car keeps going straight. The ego vehicle "
     "must not exceed its speed limit.",
     "behavior: the oncoming car keeps going straight through the intersection\n"
     "geometry: a crossroads where the ego vehicle turns left across oncoming traffic\n"
     "spawn: an oncoming car approaching from the opposite direction\n"
     "adversarial_object: a car\n"
     "requirements: the ego vehicle must not exceed its speed limit\n"
     "other_objects: none\n"
     "weather: none"},
};

std::string user_turn(std::string_view category, std::string_view description) {
  return std::string(kCategoryMarker) + std::string(category) + "\n" + std::string(kDescriptionMarker) +
         std::string(description);
}

bool is_none(std::string_view v) { return util::to_lower(util::trim(v)) == "none" || util::trim(v).empty(); }

}  // namespace

bool is_optional_field(std::string_view field) {
  return field == "requirements" || field == "other_objects" || field == "weather";
}

std::optional<std::string> SemanticDecomposition::field(std::string_view label) const {
  if (label == "behavior") return behavior;
  if (label == "geometry") return geometry;
  if (label == "spawn") return spawn_relation;
  if (label == "adversarial_object") return adversarial_object;
  if (label == "requirements") return requirements;
  if (label == "other_objects") return other_objects;
  if (label == "weather") return weather;
  return std::nullopt;
}

std::string render_decomposition(const SemanticDecomposition& d) {
  std::string out;
  for (auto label : kFieldOrder)
    if (auto v = d.field(label)) out += std::string(label) + ": " + *v + "\n";
  return out;
}

std::string default_field_text(std::string_view category, std::string_view field) {
  static const std::map<std::string_view, std::array<std::string_view, 4>> table = {
      // behavior, geometry, spawn, adversarial_object
      {"straight_obstacle",
       {"the adversary stays stopped and does not move", "a straight two-lane road",
        "a stalled vehicle blocking the lane ahead of the ego vehicle", "a broken-down stalled vehicle"}},
      {"turning_obstacle",
       {"the adversary stays stopped and does not move", "a four-way intersection controlled by a traffic light",
        "a static obstacle ahead of the ego vehicle in the same lane", "a static obstacle such as a traffic cone or debris"}},
      {"lane_changing",
       {"the adversarial vehicle cuts in front of the ego vehicle by changing lanes", "a straight two-lane road",
        "a vehicle in the adjacent left lane next to the ego vehicle", "a sedan car driving at normal speed"}},
      {"vehicle_passing",
       {"the vehicle overtakes the ego vehicle using the left lane and merges back",
        "a straight highway segment with two lanes in the same direction", "a vehicle approaching from behind the ego vehicle",
        "a sedan car driving at normal speed"}},
      {"red_light_running",
       {"the vehicle ignores the red traffic light and drives through the intersection",
        "a four-way intersection controlled by a traffic light",
        "a vehicle approaching the intersection from the cross street", "a sedan car driving at normal speed"}},
      {"unprotected_left_turn",
       {"the oncoming vehicle keeps going straight through the intersection",
        "an intersection where the ego vehicle turns left across oncoming traffic",
        "an oncoming vehicle approaching from the opposite direction", "a sedan car driving at normal speed"}},
      {"right_turn",
       {"the oncoming vehicle keeps going straight through the intersection",
        "a junction where the ego vehicle makes a right turn onto the main road",
        "a vehicle approaching the intersection from the cross street", "a sedan car driving at normal speed"}},
      {"crossing_negotiation",
       {"the pedestrian waits briefly and then crosses the road", "an urban crossroads where two streets cross",
        "a pedestrian standing at the roadside ahead of the ego vehicle", "a pedestrian walking"}},
  };
  auto it = table.find(category);
  if (it == table.end()) it = table.find("straight_obstacle");
  if (field == "behavior") return std::string(it->second[0]);
  if (field == "geometry") return std::string(it->second[1]);
  if (field == "spawn") return std::string(it->second[2]);
  if (field == "adversarial_object") return std::string(it->second[3]);
  return {};
}

ExtractionParse parse_extraction(std::string_view response, std::string_view category) {
  std::string body = response.find("```") != std::string_view::npos ? util::strip_code_fence(response)
                                                                      : std::string(response);
  std::map<std::string, std::string, std::less<>> fields;
  for (const auto& raw : util::split_lines(body)) {
    auto line = util::trim(raw);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) return {std::nullopt, "line without `field:` prefix: " + std::string(line)};
    auto label = util::to_lower(util::trim(line.substr(0, colon)));
    if (std::find(kFieldOrder.begin(), kFieldOrder.end(), label) == kFieldOrder.end())
      return {std::nullopt, "unknown field '" + label + "'"};
    if (fields.count(label)) return {std::nullopt, "field '" + label + "' appears twice"};
    fields[label] = std::string(util::trim(line.substr(colon + 1)));
  }
  SemanticDecomposition d;
  for (auto label : kFieldOrder) {
    auto it = fields.find(label);
    if (!is_optional_field(label) && it == fields.end())
      return {std::nullopt, "missing field '" + std::string(label) + "'"};
    std::optional<std::string> value;
    if (it != fields.end() && !is_none(it->second)) value = it->second;
    if (!is_optional_field(label) && !value) value = default_field_text(category, label);
    if (label == "behavior") d.behavior = *value;
    if (label == "geometry") d.geometry = *value;
    if (label == "spawn") d.spawn_relation = *value;
    if (label == "adversarial_object") d.adversarial_object = *value;
    if (label == "requirements") d.requirements = value;
    if (label == "other_objects") d.other_objects = value;
    if (label == "weather") d.weather = value;
  }
  return {d, {}};
}

llm::ChatRequest build_extraction_request(const ScenarioPrompt& prompt, double temperature) {
  llm::ChatRequest r;
  r.tag = llm::Tag::extract;
  r.temperature = temperature;
  r.messages.push_back({llm::Role::system, std::string(kSystem)});
  for (const auto& shot : kShots) {
    r.messages.push_back({llm::Role::user, user_turn(shot.category, shot.description)});
    r.messages.push_back({llm::Role::assistant, std::string(shot.answer)});
  }
  r.messages.push_back({llm::Role::user, user_turn(prompt.category, prompt.text)});
  return r;
}

SemanticDecomposition extract_components(const ScenarioPrompt& prompt, llm::Gateway& llm, double temperature) {
  auto request = build_extraction_request(prompt, temperature);
  auto first = llm.complete(request);
  auto parsed = parse_extraction(first.content, prompt.category);
  if (parsed.value) return *parsed.value;

  request.messages.push_back({llm::Role::assistant, first.content});
  request.messages.push_back({llm::Role::user, "Your reply could not be parsed (" + parsed.error +
                                                   "). Reply with exactly the seven `field: value` lines and "
                                                   "nothing else."});
  auto second = llm.complete(request);
  auto reparsed = parse_extraction(second.content, prompt.category);
  if (reparsed.value) return *reparsed.value;
  throw Error("extract.unparseable", "extraction for '" + prompt.id + "' failed twice: " + reparsed.error);
}

}  // namespace arise::pipeline
