#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "arise/dsl/diagnostic.hpp"

namespace arise::dsl {

/// Source location attached to AST nodes. Locations never participate in
/// structural equality, so a reformatted module compares equal to its origin.
struct Loc {
  SourceSpan span;
  friend bool operator==(const Loc&, const Loc&) { return true; }
};

enum class ObjectKind { car, truck, bicycle, pedestrian, static_prop };
enum class Direction { left, right, straight };
enum class ActionKind { follow_lane, lane_change, brake, wait, accelerate, turn };
enum class Anchor { absolute_point, on_lane, relative };
enum class Relation { ahead_of, behind, left_of, right_of };
enum class ParamType { any, number, direction, object };
enum class CmpOp { lt, le, gt, ge, eq, ne };

std::string_view to_string(ObjectKind k);   // DSL class name, e.g. "Car"
std::string_view to_string(Direction d);
std::string_view to_string(ActionKind k);
std::string_view to_string(Relation r);
std::string_view to_string(ParamType t);
std::string_view to_string(CmpOp op);

std::optional<ObjectKind> object_kind_from(std::string_view dsl_name);
std::optional<ActionKind> action_kind_from(std::string_view name);
std::optional<ParamType> param_type_from(std::string_view name);

/// Bare identifier used as a value: a param, behavior parameter, object, or
/// one of the built-in constants (`inf`, `red`, `green`, `yellow`, `straight`).
struct Name {
  std::string id;
  friend bool operator==(const Name&, const Name&) = default;
};

struct Value {
  std::variant<double, std::string, bool, Name, Direction> data;
  Loc loc;

  friend bool operator==(const Value&, const Value&) = default;

  const double* number() const { return std::get_if<double>(&data); }
  const Name* name() const { return std::get_if<Name>(&data); }
  const Direction* direction() const { return std::get_if<Direction>(&data); }
};

struct Operand {
  enum class Kind { value, speed, lane, distance, signal };
  Kind kind = Kind::value;
  Value value;            // Kind::value; signal index for Kind::signal
  std::string object;     // speed, lane, distance (first argument)
  std::string other;      // distance (second argument)
  Loc loc;

  friend bool operator==(const Operand&, const Operand&) = default;
};

struct Comparison {
  Operand lhs;
  CmpOp op = CmpOp::eq;
  Operand rhs;
  Loc loc;
  friend bool operator==(const Comparison&, const Comparison&) = default;
};

/// Conjunction of comparisons.
struct Condition {
  std::vector<Comparison> terms;
  friend bool operator==(const Condition&, const Condition&) = default;
};

struct Action {
  ActionKind kind = ActionKind::follow_lane;
  std::vector<Value> args;
  Loc loc;
  friend bool operator==(const Action&, const Action&) = default;
};

struct Interrupt {
  Condition when;
  std::vector<Action> actions;
  Loc loc;
  friend bool operator==(const Interrupt&, const Interrupt&) = default;
};

struct BehaviorParam {
  std::string name;
  ParamType type = ParamType::any;
  friend bool operator==(const BehaviorParam&, const BehaviorParam&) = default;
};

struct BehaviorDef {
  std::string name;
  std::vector<BehaviorParam> params;
  std::vector<Action> actions;
  std::vector<Interrupt> interrupts;
  Loc loc;
  friend bool operator==(const BehaviorDef&, const BehaviorDef&) = default;
};

struct PlacementExpr {
  Anchor anchor = Anchor::on_lane;
  std::optional<Relation> relation;
  std::optional<std::string> reference;
  std::optional<Value> distance;
  std::optional<Value> heading;
  std::optional<Value> lane;               // on_lane; absent = any lane
  std::optional<std::array<Value, 2>> point;  // absolute_point
  Loc loc;
  friend bool operator==(const PlacementExpr&, const PlacementExpr&) = default;
};

struct BehaviorCall {
  std::string name;
  std::vector<Value> args;
  Loc loc;
  friend bool operator==(const BehaviorCall&, const BehaviorCall&) = default;
};

struct Attribute {
  std::string name;
  Value value;
  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct ObjectDef {
  std::string name;
  ObjectKind kind = ObjectKind::car;
  PlacementExpr placement;
  std::optional<BehaviorCall> behavior;
  std::vector<Attribute> attributes;
  Loc loc;
  friend bool operator==(const ObjectDef&, const ObjectDef&) = default;
};

struct ModelDecl {
  std::string name;
  Loc loc;
  friend bool operator==(const ModelDecl&, const ModelDecl&) = default;
};

struct ParamDecl {
  std::string name;
  Value value;
  Loc loc;
  friend bool operator==(const ParamDecl&, const ParamDecl&) = default;
};

struct RequireStmt {
  Condition condition;
  Loc loc;
  friend bool operator==(const RequireStmt&, const RequireStmt&) = default;
};

using Statement = std::variant<ModelDecl, ParamDecl, BehaviorDef, ObjectDef, RequireStmt>;

SourceSpan span_of(const Statement& s);

/// Labelled half-open range of top-level statement indices.
struct Region {
  std::string label;
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const Region&, const Region&) = default;
};

/// The fixed region labels, in canonical assembly order.
inline constexpr std::array<std::string_view, 8> kRegionOrder = {
    "geometry", "weather",       "defaults",      "adversarial_object",
    "spawn",    "behavior",      "other_objects", "requirements",
};

bool is_region_label(std::string_view label);

/// Built-in behaviors usable without a definition, with their arity.
struct BuiltinBehavior {
  std::string_view name;
  std::size_t arity;
};
inline constexpr std::array<BuiltinBehavior, 2> kBuiltinBehaviors = {{
    {"FollowLaneBehavior", 1},
    {"WaitBehavior", 0},
}};
const BuiltinBehavior* find_builtin_behavior(std::string_view name);

/// Parsed program. Statements keep source order so regions can index them;
/// the typed views below are derived from the statement list.
struct ScriptModule {
  std::vector<Statement> statements;
  std::vector<Region> regions;

  friend bool operator==(const ScriptModule&, const ScriptModule&) = default;

  const ModelDecl* model_decl() const;
  /// The `param map = "<name>"` declaration, if any.
  const ParamDecl* map_decl() const;
  std::optional<std::string> map_name() const;
  std::vector<const ParamDecl*> params() const;
  std::vector<const BehaviorDef*> behaviors() const;
  std::vector<const ObjectDef*> objects() const;
  std::vector<const RequireStmt*> requirements() const;

  const ObjectDef* find_object(std::string_view name) const;
  const BehaviorDef* find_behavior(std::string_view name) const;
  const ParamDecl* find_param(std::string_view name) const;
  const Region* find_region(std::string_view label) const;
};

}  // namespace arise::dsl
