#include "arise/dsl/analyzer.hpp"

#include <map>

namespace arise::dsl {

namespace {

constexpr std::string_view kBuiltinConstants[] = {"inf", "straight", "red", "yellow", "green"};

struct ActionArity {
  ActionKind kind;
  std::size_t min;
  std::size_t max;
};
constexpr ActionArity kActionArity[] = {
    {ActionKind::follow_lane, 1, 2}, {ActionKind::lane_change, 1, 1}, {ActionKind::brake, 1, 1},
    {ActionKind::wait, 0, 1},        {ActionKind::accelerate, 1, 1},  {ActionKind::turn, 1, 1},
};

enum class ValueType { number, direction, other, unknown };

class Analyzer {
 public:
  Analyzer(const ScriptModule& m, const MapCatalog& maps) : m_(m), maps_(maps) {}

  std::vector<Diagnostic> run() {
    check_names();
    check_map();
    for (const auto* b : m_.behaviors()) check_behavior(*b);
    for (const auto* o : m_.objects()) check_object(*o);
    for (const auto* r : m_.requirements()) check_condition(r->condition, nullptr);
    check_cycles();
    return std::move(out_);
  }

 private:
  void emit(std::string code, std::string message, SourceSpan span) {
    out_.push_back(compile_error(std::move(code), std::move(message), span));
  }

  void check_names() {
    std::map<std::string, SourceSpan, std::less<>> objects, behaviors, params;
    for (const auto& s : m_.statements) {
      if (const auto* o = std::get_if<ObjectDef>(&s)) {
        if (!objects.emplace(o->name, o->loc.span).second)
          emit("sem.duplicate_name", "object '" + o->name + "' is defined more than once", o->loc.span);
      } else if (const auto* b = std::get_if<BehaviorDef>(&s)) {
        if (!behaviors.emplace(b->name, b->loc.span).second || find_builtin_behavior(b->name))
          emit("sem.duplicate_name", "behavior '" + b->name + "' is defined more than once", b->loc.span);
      } else if (const auto* p = std::get_if<ParamDecl>(&s)) {
        if (!params.emplace(p->name, p->loc.span).second)
          emit("sem.duplicate_name", "param '" + p->name + "' is defined more than once", p->loc.span);
      }
    }
    if (!objects.count("ego")) {
      SourceSpan at = m_.model_decl() ? m_.model_decl()->loc.span : SourceSpan{1, 1, 0};
      emit("sem.missing_ego", "script defines no object named 'ego'", at);
    }
  }

  void check_map() {
    const auto* decl = m_.map_decl();
    if (!decl) return;
    auto name = m_.map_name();
    if (!name || !maps_.count(*name))
      emit("sem.unknown_map", "unknown map '" + (name ? *name : format_hint(decl->value)) + "'",
           decl->value.loc.span);
  }

  static std::string format_hint(const Value& v) {
    if (const auto* d = v.number()) return std::to_string(*d);
    return "?";
  }

  bool object_known(std::string_view name, const BehaviorDef* scope) const {
    if (m_.find_object(name)) return true;
    if (scope && name == "self") return true;
    if (scope) {
      for (const auto& p : scope->params)
        if (p.name == name && (p.type == ParamType::object || p.type == ParamType::any)) return true;
    }
    return false;
  }

  ValueType type_of(const Value& v, const BehaviorDef* scope, int depth = 0) {
    if (v.number()) return ValueType::number;
    if (v.direction()) return ValueType::direction;
    const Name* n = v.name();
    if (!n) return ValueType::other;
    if (scope) {
      for (const auto& p : scope->params) {
        if (p.name != n->id) continue;
        if (p.type == ParamType::number) return ValueType::number;
        if (p.type == ParamType::direction) return ValueType::direction;
        return ValueType::unknown;
      }
    }
    if (n->id == "inf") return ValueType::number;
    if (n->id == "straight") return ValueType::direction;
    if (is_builtin_constant(n->id)) return ValueType::other;
    if (const auto* p = m_.find_param(n->id); p && depth < 8) return type_of(p->value, nullptr, depth + 1);
    if (m_.find_object(n->id)) return ValueType::other;
    emit("sem.undefined_name", "name '" + n->id + "' is not defined", v.loc.span);
    return ValueType::unknown;
  }

  void expect_type(const Value& v, ValueType want, const BehaviorDef* scope, std::string_view what) {
    auto got = type_of(v, scope);
    if (got == ValueType::unknown || got == want) return;
    emit("sem.type_mismatch",
         std::string(what) + " expects a " + (want == ValueType::number ? "number" : "direction"),
         v.loc.span);
  }

  void check_action(const Action& a, const BehaviorDef& scope) {
    for (const auto& arity : kActionArity) {
      if (arity.kind != a.kind) continue;
      if (a.args.size() < arity.min || a.args.size() > arity.max) {
        emit("sem.arity_mismatch",
             std::string(to_string(a.kind)) + " takes " + std::to_string(arity.min) +
                 (arity.min == arity.max ? "" : "-" + std::to_string(arity.max)) + " argument(s), got " +
                 std::to_string(a.args.size()),
             a.loc.span);
        return;
      }
    }
    bool directional = a.kind == ActionKind::lane_change || a.kind == ActionKind::turn;
    for (const auto& arg : a.args)
      expect_type(arg, directional ? ValueType::direction : ValueType::number, &scope, to_string(a.kind));
  }

  void check_behavior(const BehaviorDef& b) {
    for (std::size_t i = 0; i < b.params.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (b.params[i].name == b.params[j].name)
          emit("sem.duplicate_name", "parameter '" + b.params[i].name + "' repeats in behavior '" + b.name + "'",
               b.loc.span);
    for (const auto& a : b.actions) check_action(a, b);
    for (const auto& in : b.interrupts) {
      check_condition(in.when, &b);
      for (const auto& a : in.actions) check_action(a, b);
    }
  }

  void check_operand(const Operand& o, const BehaviorDef* scope) {
    auto need = [&](const std::string& name) {
      if (!object_known(name, scope))
        emit("sem.undefined_object", "object '" + name + "' is not defined", o.loc.span);
    };
    switch (o.kind) {
      case Operand::Kind::speed:
      case Operand::Kind::lane: need(o.object); break;
      case Operand::Kind::distance:
        need(o.object);
        need(o.other);
        break;
      case Operand::Kind::value:
        if (const Name* n = o.value.name(); n && scope && n->id == "self") break;
        type_of(o.value, scope);
        break;
      case Operand::Kind::signal: break;
    }
  }

  void check_condition(const Condition& c, const BehaviorDef* scope) {
    for (const auto& t : c.terms) {
      check_operand(t.lhs, scope);
      check_operand(t.rhs, scope);
    }
  }

  void check_object(const ObjectDef& o) {
    const auto& p = o.placement;
    if (p.reference && !m_.find_object(*p.reference))
      emit("sem.undefined_object", "placement of '" + o.name + "' references undefined object '" + *p.reference + "'",
           p.loc.span);
    if (p.distance) {
      expect_type(*p.distance, ValueType::number, nullptr, "placement distance");
      if (const double* d = p.distance->number(); d && !(*d > 0))
        emit("sem.bad_distance", "placement distance must be positive", p.distance->loc.span);
    }
    if (p.heading) expect_type(*p.heading, ValueType::number, nullptr, "facing");
    if (p.lane) expect_type(*p.lane, ValueType::number, nullptr, "lane");
    if (p.point) {
      expect_type((*p.point)[0], ValueType::number, nullptr, "point");
      expect_type((*p.point)[1], ValueType::number, nullptr, "point");
    }
    for (const auto& attr : o.attributes) {
      if (attr.name == "speed") expect_type(attr.value, ValueType::number, nullptr, "speed");
      else if (attr.value.name()) type_of(attr.value, nullptr);
    }
    if (!o.behavior) return;
    const auto& call = *o.behavior;
    std::size_t arity = 0;
    const BehaviorDef* def = m_.find_behavior(call.name);
    if (def) {
      arity = def->params.size();
    } else if (const auto* builtin = find_builtin_behavior(call.name)) {
      arity = builtin->arity;
    } else {
      emit("sem.undefined_behavior", "behavior '" + call.name + "' is not defined", call.loc.span);
      return;
    }
    if (call.args.size() != arity) {
      emit("sem.arity_mismatch",
           "behavior '" + call.name + "' takes " + std::to_string(arity) + " argument(s), got " +
               std::to_string(call.args.size()),
           call.loc.span);
      return;
    }
    for (std::size_t i = 0; i < call.args.size(); ++i) {
      const auto& arg = call.args[i];
      if (const Name* n = arg.name(); n && m_.find_object(n->id)) continue;
      ParamType want = def ? def->params[i].type : ParamType::number;
      if (want == ParamType::number) expect_type(arg, ValueType::number, nullptr, "behavior argument");
      else if (want == ParamType::direction) expect_type(arg, ValueType::direction, nullptr, "behavior argument");
      else type_of(arg, nullptr);
    }
  }

  void check_cycles() {
    for (const auto* o : m_.objects()) {
      const ObjectDef* cur = o;
      for (std::size_t steps = 0; cur && cur->placement.reference; ++steps) {
        cur = m_.find_object(*cur->placement.reference);
        if (cur == o || steps > m_.objects().size()) {
          emit("sem.placement_cycle", "placement of '" + o->name + "' depends on itself", o->placement.loc.span);
          break;
        }
      }
    }
  }

  const ScriptModule& m_;
  const MapCatalog& maps_;
  std::vector<Diagnostic> out_;
};

}  // namespace

bool is_builtin_constant(std::string_view name) {
  for (auto c : kBuiltinConstants)
    if (c == name) return true;
  return false;
}

std::vector<Diagnostic> analyze(const ScriptModule& module, const MapCatalog& maps) {
  return Analyzer(module, maps).run();
}

}  // namespace arise::dsl
