#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arise/dsl/ast.hpp"
#include "arise/exec/road_network.hpp"

namespace arise::exec {

struct ExecutionLimits {
  int max_spawn_attempts = 15;
  int sim_steps = 200;
  double step_dt = 0.1;
  std::uint64_t seed = 0;

  friend bool operator==(const ExecutionLimits&, const ExecutionLimits&) = default;
};

enum class ExecutionStatus { success, spawn_failure, runtime_error, requirement_violation };
std::string_view to_string(ExecutionStatus s);
std::optional<ExecutionStatus> execution_status_from(std::string_view s);

struct ObjectSummary {
  std::string name;
  Vec2 final_position;
  std::optional<double> min_distance;  // nearest other object over the run
  bool collided = false;

  friend bool operator==(const ObjectSummary&, const ObjectSummary&) = default;
};

struct ExecutionResult {
  ExecutionStatus status = ExecutionStatus::success;
  int spawn_attempts_used = 0;
  std::vector<dsl::Diagnostic> diagnostics;
  std::vector<ObjectSummary> trajectory_summary;

  friend bool operator==(const ExecutionResult&, const ExecutionResult&) = default;
};

/// Footprint (length, width) in metres.
struct Footprint {
  double length;
  double width;
};
Footprint footprint(dsl::ObjectKind kind);

/// Runs the spawn phase and a fixed-step kinematic simulation. Deterministic in
/// (module, network, limits). Failures are reported through status and
/// execute-phase diagnostics; nothing is thrown for script errors.
ExecutionResult execute(const dsl::ScriptModule& module, const RoadNetwork& network,
                        const ExecutionLimits& limits);

}  // namespace arise::exec
