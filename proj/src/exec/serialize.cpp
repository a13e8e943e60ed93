#include "arise/exec/serialize.hpp"

#include "arise/error.hpp"

namespace arise::dsl {

void to_json(nlohmann::json& j, const SourceSpan& s) {
  j = {{"line", s.line}, {"column", s.column}, {"length", s.length}};
}

void from_json(const nlohmann::json& j, SourceSpan& s) {
  s.line = j.at("line").get<int>();
  s.column = j.at("column").get<int>();
  s.length = j.at("length").get<int>();
}

void to_json(nlohmann::json& j, const Diagnostic& d) {
  j = {{"phase", std::string(to_string(d.phase))}, {"code", d.code}, {"message", d.message}};
  j["span"] = d.span ? nlohmann::json(*d.span) : nlohmann::json(nullptr);
  j["trace"] = d.trace;
}

void from_json(const nlohmann::json& j, Diagnostic& d) {
  auto phase = j.at("phase").get<std::string>();
  if (phase == "compile") d.phase = Phase::compile;
  else if (phase == "execute") d.phase = Phase::execute;
  else throw nlohmann::json::other_error::create(501, "unknown phase '" + phase + "'", &j);
  d.code = j.at("code").get<std::string>();
  d.message = j.at("message").get<std::string>();
  if (j.contains("span") && !j["span"].is_null()) d.span = j["span"].get<SourceSpan>();
  else d.span.reset();
  d.trace = j.value("trace", std::vector<std::string>{});
}

}  // namespace arise::dsl

namespace arise::exec {

void to_json(nlohmann::json& j, const ExecutionLimits& l) {
  j = {{"max_spawn_attempts", l.max_spawn_attempts},
       {"sim_steps", l.sim_steps},
       {"step_dt", l.step_dt},
       {"seed", l.seed}};
}

void from_json(const nlohmann::json& j, ExecutionLimits& l) {
  ExecutionLimits d;
  l.max_spawn_attempts = j.value("max_spawn_attempts", d.max_spawn_attempts);
  l.sim_steps = j.value("sim_steps", d.sim_steps);
  l.step_dt = j.value("step_dt", d.step_dt);
  l.seed = j.value("seed", d.seed);
  if (l.max_spawn_attempts < 1 || l.sim_steps < 1 || !(l.step_dt > 0))
    throw nlohmann::json::other_error::create(501, "execution limits out of range", &j);
}

void to_json(nlohmann::json& j, const ObjectSummary& s) {
  j = {{"name", s.name},
       {"final_position", {s.final_position.x, s.final_position.y}},
       {"min_distance", s.min_distance ? nlohmann::json(*s.min_distance) : nlohmann::json(nullptr)},
       {"collided", s.collided}};
}

void from_json(const nlohmann::json& j, ObjectSummary& s) {
  s.name = j.at("name").get<std::string>();
  const auto& p = j.at("final_position");
  s.final_position = {p.at(0).get<double>(), p.at(1).get<double>()};
  if (j.at("min_distance").is_null()) s.min_distance.reset();
  else s.min_distance = j["min_distance"].get<double>();
  s.collided = j.at("collided").get<bool>();
}

void to_json(nlohmann::json& j, const ExecutionResult& r) {
  j = {{"status", std::string(to_string(r.status))},
       {"spawn_attempts_used", r.spawn_attempts_used},
       {"diagnostics", r.diagnostics},
       {"trajectory", r.trajectory_summary}};
}

void from_json(const nlohmann::json& j, ExecutionResult& r) {
  auto status = execution_status_from(j.at("status").get<std::string>());
  if (!status) throw nlohmann::json::other_error::create(501, "unknown execution status", &j);
  r.status = *status;
  r.spawn_attempts_used = j.at("spawn_attempts_used").get<int>();
  r.diagnostics = j.at("diagnostics").get<std::vector<dsl::Diagnostic>>();
  r.trajectory_summary = j.value("trajectory", std::vector<ObjectSummary>{});
}

void to_json(nlohmann::json& j, const ValidationReport& r) {
  j = {{"outcome", std::string(to_string(r.outcome()))}, {"compile_diagnostics", r.compile_diagnostics}};
  j["execution"] = r.execution ? nlohmann::json(*r.execution) : nlohmann::json(nullptr);
}

}  // namespace arise::exec
