#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arise/dsl/analyzer.hpp"
#include "arise/dsl/ast.hpp"
#include "arise/dsl/diagnostic.hpp"
#include "arise/exec/executor.hpp"
#include "arise/exec/road_network.hpp"

namespace arise::exec {

enum class Outcome { compile_fail, exec_fail, success };
std::string_view to_string(Outcome o);

/// Result of the compile gate followed (only when it passes) by execution.
struct ValidationReport {
  std::vector<dsl::Diagnostic> compile_diagnostics;
  std::optional<ExecutionResult> execution;

  Outcome outcome() const;
  bool passed() const { return outcome() == Outcome::success; }
  /// Compile diagnostics, or the execution diagnostics when compile passed.
  std::vector<dsl::Diagnostic> diagnostics() const;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Named road networks the gate can execute against.
class MapSet {
 public:
  void add(RoadNetwork network);
  /// Loads every `*.json` map in a directory (sorted by file name).
  static MapSet load_dir(const std::string& dir);

  const RoadNetwork* find(std::string_view name) const;
  dsl::MapCatalog catalog() const;
  bool empty() const { return maps_.empty(); }

 private:
  std::map<std::string, RoadNetwork, std::less<>> maps_;
};

/// Map scripts run on when they declare none.
inline constexpr std::string_view kDefaultMap = "straight";

/// Parse + analyze + map resolution, without executing.
std::vector<dsl::Diagnostic> compile_check(const dsl::ScriptModule& module, const MapSet& maps);
std::vector<dsl::Diagnostic> compile_source(std::string_view source, const MapSet& maps);

/// Analyze, then execute only on an empty diagnostic list.
ValidationReport validate(const dsl::ScriptModule& module, const MapSet& maps, const ExecutionLimits& limits);

/// Parse + analyze + execute from raw source.
ValidationReport validate_source(std::string_view source, const MapSet& maps, const ExecutionLimits& limits);

/// The gate the repair loop consumes. Implementations may run in-process or
/// behind the executor protocol.
class Validator {
 public:
  virtual ~Validator() = default;
  virtual ValidationReport validate(std::string_view source, const ExecutionLimits& limits) = 0;
};

class BuiltinValidator final : public Validator {
 public:
  explicit BuiltinValidator(std::shared_ptr<const MapSet> maps) : maps_(std::move(maps)) {}
  ValidationReport validate(std::string_view source, const ExecutionLimits& limits) override;

 private:
  std::shared_ptr<const MapSet> maps_;
};

}  // namespace arise::exec
