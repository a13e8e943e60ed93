#include "arise/dsl/ast.hpp"

#include <algorithm>

namespace arise::dsl {

namespace {

struct KindName {
  ObjectKind kind;
  std::string_view name;
};
constexpr std::array<KindName, 5> kKinds = {{
    {ObjectKind::car, "Car"},
    {ObjectKind::truck, "Truck"},
    {ObjectKind::bicycle, "Bicycle"},
    {ObjectKind::pedestrian, "Pedestrian"},
    {ObjectKind::static_prop, "Prop"},
}};

struct ActionName {
  ActionKind kind;
  std::string_view name;
};
constexpr std::array<ActionName, 6> kActions = {{
    {ActionKind::follow_lane, "follow_lane"},
    {ActionKind::lane_change, "lane_change"},
    {ActionKind::brake, "brake"},
    {ActionKind::wait, "wait"},
    {ActionKind::accelerate, "accelerate"},
    {ActionKind::turn, "turn"},
}};

template <class T>
std::vector<const T*> collect(const std::vector<Statement>& statements) {
  std::vector<const T*> out;
  for (const auto& s : statements)
    if (const auto* p = std::get_if<T>(&s)) out.push_back(p);
  return out;
}

}  // namespace

std::string_view to_string(ObjectKind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.name;
  return "?";
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::left: return "left";
    case Direction::right: return "right";
    case Direction::straight: return "straight";
  }
  return "?";
}

std::string_view to_string(ActionKind k) {
  for (const auto& e : kActions)
    if (e.kind == k) return e.name;
  return "?";
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::ahead_of: return "ahead of";
    case Relation::behind: return "behind";
    case Relation::left_of: return "left of";
    case Relation::right_of: return "right of";
  }
  return "?";
}

std::string_view to_string(ParamType t) {
  switch (t) {
    case ParamType::any: return "any";
    case ParamType::number: return "number";
    case ParamType::direction: return "direction";
    case ParamType::object: return "object";
  }
  return "?";
}

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
    case CmpOp::eq: return "==";
    case CmpOp::ne: return "!=";
  }
  return "?";
}

std::optional<ObjectKind> object_kind_from(std::string_view dsl_name) {
  for (const auto& e : kKinds)
    if (e.name == dsl_name) return e.kind;
  return std::nullopt;
}

std::optional<ActionKind> action_kind_from(std::string_view name) {
  for (const auto& e : kActions)
    if (e.name == name) return e.kind;
  return std::nullopt;
}

std::optional<ParamType> param_type_from(std::string_view name) {
  for (auto t : {ParamType::any, ParamType::number, ParamType::direction, ParamType::object})
    if (to_string(t) == name) return t;
  return std::nullopt;
}

SourceSpan span_of(const Statement& s) {
  return std::visit([](const auto& node) { return node.loc.span; }, s);
}

bool is_region_label(std::string_view label) {
  return std::find(kRegionOrder.begin(), kRegionOrder.end(), label) != kRegionOrder.end();
}

const BuiltinBehavior* find_builtin_behavior(std::string_view name) {
  for (const auto& b : kBuiltinBehaviors)
    if (b.name == name) return &b;
  return nullptr;
}

const ModelDecl* ScriptModule::model_decl() const {
  for (const auto& s : statements)
    if (const auto* m = std::get_if<ModelDecl>(&s)) return m;
  return nullptr;
}

const ParamDecl* ScriptModule::map_decl() const { return find_param("map"); }

std::optional<std::string> ScriptModule::map_name() const {
  const auto* decl = map_decl();
  if (!decl) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&decl->value.data)) return *s;
  if (const auto* n = decl->value.name()) return n->id;
  return std::nullopt;
}

std::vector<const ParamDecl*> ScriptModule::params() const { return collect<ParamDecl>(statements); }
std::vector<const BehaviorDef*> ScriptModule::behaviors() const { return collect<BehaviorDef>(statements); }
std::vector<const ObjectDef*> ScriptModule::objects() const { return collect<ObjectDef>(statements); }
std::vector<const RequireStmt*> ScriptModule::requirements() const { return collect<RequireStmt>(statements); }

const ObjectDef* ScriptModule::find_object(std::string_view name) const {
  for (const auto* o : objects())
    if (o->name == name) return o;
  return nullptr;
}

const BehaviorDef* ScriptModule::find_behavior(std::string_view name) const {
  for (const auto* b : behaviors())
    if (b->name == name) return b;
  return nullptr;
}

const ParamDecl* ScriptModule::find_param(std::string_view name) const {
  for (const auto* p : params())
    if (p->name == name) return p;
  return nullptr;
}

const Region* ScriptModule::find_region(std::string_view label) const {
  for (const auto& r : regions)
    if (r.label == label) return &r;
  return nullptr;
}

}  // namespace arise::dsl
