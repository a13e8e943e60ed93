#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "arise/llm/provider.hpp"
#include "arise/pipeline/scenario.hpp"

namespace arise::pipeline {

/// Field labels of the extraction record, in output order. They coincide with
/// the knowledge-base categories.
inline constexpr std::array<std::string_view, 7> kFieldOrder = {
    "behavior", "geometry", "spawn", "adversarial_object", "requirements", "other_objects", "weather",
};
bool is_optional_field(std::string_view field);

struct SemanticDecomposition {
  std::string behavior;
  std::string geometry;
  std::string spawn_relation;
  std::string adversarial_object;
  std::optional<std::string> requirements;
  std::optional<std::string> other_objects;
  std::optional<std::string> weather;

  /// Field text by label; nullopt for an absent optional field.
  std::optional<std::string> field(std::string_view label) const;

  friend bool operator==(const SemanticDecomposition&, const SemanticDecomposition&) = default;
};

/// `label: value` lines in kFieldOrder; absent optional fields are omitted.
std::string render_decomposition(const SemanticDecomposition& d);

/// Text used for a mandatory field the model reported as `none`.
std::string default_field_text(std::string_view category, std::string_view field);

/// Strict parse of a field-per-line record. Every line must be `label: value`
/// with a known label, no label may repeat and the four mandatory labels must
/// be present. `none` marks an absent field. Returns an error description on
/// failure instead of throwing.
struct ExtractionParse {
  std::optional<SemanticDecomposition> value;
  std::string error;
};
ExtractionParse parse_extraction(std::string_view response, std::string_view category);

/// Marker lines the extraction prompt uses; providers may rely on them.
inline constexpr std::string_view kCategoryMarker = "Scenario type: ";
inline constexpr std::string_view kDescriptionMarker = "Description: ";

llm::ChatRequest build_extraction_request(const ScenarioPrompt& prompt, double temperature);

/// Few-shot extraction with one format-reminder retry. Throws
/// `extract.unparseable` when both replies fail to parse.
SemanticDecomposition extract_components(const ScenarioPrompt& prompt, llm::Gateway& llm, double temperature);

}  // namespace arise::pipeline
