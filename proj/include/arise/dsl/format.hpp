#pragma once

#include <string>

#include "arise/dsl/ast.hpp"

namespace arise::dsl {

/// Canonical source text: one region marker line before each region, a blank
/// line between regions, 4-space block indentation, shortest round-trip
/// numbers, double-quoted strings.
std::string format(const ScriptModule& module);

std::string format_statement(const Statement& statement);
std::string format_value(const Value& value);
std::string format_condition(const Condition& condition);

}  // namespace arise::dsl
