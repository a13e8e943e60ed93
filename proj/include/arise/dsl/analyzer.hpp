#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "arise/dsl/ast.hpp"

namespace arise::dsl {

using MapCatalog = std::set<std::string, std::less<>>;

/// Constants every script may reference without declaring them.
bool is_builtin_constant(std::string_view name);

/// Semantic checks over a parsed module. Never aborts; an empty result means
/// the module passes the compile gate. Codes: `sem.missing_ego`,
/// `sem.duplicate_name`, `sem.unknown_map`, `sem.undefined_behavior`,
/// `sem.undefined_object`, `sem.undefined_name`, `sem.arity_mismatch`,
/// `sem.type_mismatch`, `sem.bad_distance`, `sem.placement_cycle`.
std::vector<Diagnostic> analyze(const ScriptModule& module, const MapCatalog& maps);

}  // namespace arise::dsl
