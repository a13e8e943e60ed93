#pragma once

#include <json.hpp>

#include "arise/dsl/diagnostic.hpp"
#include "arise/exec/executor.hpp"
#include "arise/exec/validate.hpp"

namespace arise::dsl {
void to_json(nlohmann::json& j, const SourceSpan& s);
void from_json(const nlohmann::json& j, SourceSpan& s);
void to_json(nlohmann::json& j, const Diagnostic& d);
void from_json(const nlohmann::json& j, Diagnostic& d);
}  // namespace arise::dsl

namespace arise::exec {
void to_json(nlohmann::json& j, const ExecutionLimits& l);
void from_json(const nlohmann::json& j, ExecutionLimits& l);
void to_json(nlohmann::json& j, const ObjectSummary& s);
void from_json(const nlohmann::json& j, ObjectSummary& s);
void to_json(nlohmann::json& j, const ExecutionResult& r);
void from_json(const nlohmann::json& j, ExecutionResult& r);
void to_json(nlohmann::json& j, const ValidationReport& r);
}  // namespace arise::exec
