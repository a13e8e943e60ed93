#include "arise/exec/validate.hpp"

#include <algorithm>
#include <filesystem>

#include "arise/dsl/parser.hpp"
#include "arise/error.hpp"

namespace arise::exec {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::compile_fail: return "compile_fail";
    case Outcome::exec_fail: return "exec_fail";
    case Outcome::success: return "success";
  }
  return "?";
}

Outcome ValidationReport::outcome() const {
  if (!compile_diagnostics.empty() || !execution) return Outcome::compile_fail;
  return execution->status == ExecutionStatus::success ? Outcome::success : Outcome::exec_fail;
}

std::vector<dsl::Diagnostic> ValidationReport::diagnostics() const {
  if (!compile_diagnostics.empty() || !execution) return compile_diagnostics;
  return execution->diagnostics;
}

void MapSet::add(RoadNetwork network) {
  std::string name = network.name;
  maps_.insert_or_assign(std::move(name), std::move(network));
}

MapSet MapSet::load_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error("map.parse_error", "map directory '" + dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  MapSet set;
  for (const auto& f : files) set.add(load_map(f.string()));
  return set;
}

const RoadNetwork* MapSet::find(std::string_view name) const {
  auto it = maps_.find(name);
  return it == maps_.end() ? nullptr : &it->second;
}

dsl::MapCatalog MapSet::catalog() const {
  dsl::MapCatalog c;
  for (const auto& [name, _] : maps_) c.insert(name);
  return c;
}

std::vector<dsl::Diagnostic> compile_check(const dsl::ScriptModule& module, const MapSet& maps) {
  auto diags = dsl::analyze(module, maps.catalog());
  if (!diags.empty()) return diags;
  std::string map = module.map_name().value_or(std::string(kDefaultMap));
  if (!maps.find(map)) {
    auto span = module.map_decl() ? module.map_decl()->value.loc.span : dsl::SourceSpan{1, 1, 0};
    diags.push_back(dsl::compile_error("sem.unknown_map", "unknown map '" + map + "'", span));
  }
  return diags;
}

std::vector<dsl::Diagnostic> compile_source(std::string_view source, const MapSet& maps) {
  auto parsed = dsl::parse_source(source);
  if (!parsed.ok()) return std::move(parsed.diagnostics);
  return compile_check(*parsed.module, maps);
}

ValidationReport validate(const dsl::ScriptModule& module, const MapSet& maps, const ExecutionLimits& limits) {
  ValidationReport report;
  report.compile_diagnostics = compile_check(module, maps);
  if (!report.compile_diagnostics.empty()) return report;
  const RoadNetwork* network = maps.find(module.map_name().value_or(std::string(kDefaultMap)));
  report.execution = execute(module, *network, limits);
  return report;
}

ValidationReport validate_source(std::string_view source, const MapSet& maps, const ExecutionLimits& limits) {
  auto parsed = dsl::parse_source(source);
  if (!parsed.ok()) {
    ValidationReport report;
    report.compile_diagnostics = std::move(parsed.diagnostics);
    return report;
  }
  return validate(*parsed.module, maps, limits);
}

ValidationReport BuiltinValidator::validate(std::string_view source, const ExecutionLimits& limits) {
  return validate_source(source, *maps_, limits);
}

}  // namespace arise::exec
