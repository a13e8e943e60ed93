#include "arise/dsl/format.hpp"

#include <algorithm>

#include "arise/util/text.hpp"

namespace arise::dsl {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_values(const std::vector<Value>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_value(values[i]);
  }
  return out;
}

std::string format_operand(const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::value: return format_value(o.value);
    case Operand::Kind::speed: return o.object + ".speed";
    case Operand::Kind::lane: return o.object + ".lane";
    case Operand::Kind::distance: return "distance(" + o.object + ", " + o.other + ")";
    case Operand::Kind::signal: return "signal(" + format_value(o.value) + ")";
  }
  return {};
}

std::string format_action(const Action& a) {
  return "do " + std::string(to_string(a.kind)) + "(" + join_values(a.args) + ")";
}

std::string format_placement(const PlacementExpr& p) {
  std::string out;
  switch (p.anchor) {
    case Anchor::on_lane:
      if (p.lane) out += " on lane(" + format_value(*p.lane) + ")";
      break;
    case Anchor::absolute_point:
      if (p.point) out += " at (" + format_value((*p.point)[0]) + ", " + format_value((*p.point)[1]) + ")";
      break;
    case Anchor::relative:
      if (p.relation) out += " " + std::string(to_string(*p.relation));
      if (p.reference) out += " " + *p.reference;
      if (p.distance) out += " by " + format_value(*p.distance);
      break;
  }
  if (p.heading) out += " facing " + format_value(*p.heading);
  return out;
}

struct StatementFormatter {
  std::string operator()(const ModelDecl& m) const { return "model " + m.name + "\n"; }

  std::string operator()(const ParamDecl& p) const {
    return "param " + p.name + " = " + format_value(p.value) + "\n";
  }

  std::string operator()(const BehaviorDef& b) const {
    std::string out = "behavior " + b.name + "(";
    for (std::size_t i = 0; i < b.params.size(); ++i) {
      if (i) out += ", ";
      out += b.params[i].name;
      if (b.params[i].type != ParamType::any) out += ": " + std::string(to_string(b.params[i].type));
    }
    out += "):\n";
    for (const auto& a : b.actions) out += "    " + format_action(a) + "\n";
    for (const auto& in : b.interrupts) {
      out += "    interrupt when " + format_condition(in.when) + ":\n";
      for (const auto& a : in.actions) out += "        " + format_action(a) + "\n";
    }
    return out;
  }

  std::string operator()(const ObjectDef& o) const {
    std::string out = o.name + " = new " + std::string(to_string(o.kind));
    out += format_placement(o.placement);
    if (o.behavior) out += " with behavior " + o.behavior->name + "(" + join_values(o.behavior->args) + ")";
    for (const auto& attr : o.attributes) out += " with " + attr.name + " " + format_value(attr.value);
    return out + "\n";
  }

  std::string operator()(const RequireStmt& r) const {
    return "require " + format_condition(r.condition) + "\n";
  }
};

}  // namespace

std::string format_value(const Value& v) {
  struct Visitor {
    std::string operator()(double d) const { return util::shortest(d); }
    std::string operator()(const std::string& s) const { return quote(s); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const Name& n) const { return n.id; }
    std::string operator()(Direction d) const { return std::string(to_string(d)); }
  };
  return std::visit(Visitor{}, v.data);
}

std::string format_condition(const Condition& c) {
  std::string out;
  for (std::size_t i = 0; i < c.terms.size(); ++i) {
    if (i) out += " and ";
    const auto& t = c.terms[i];
    out += format_operand(t.lhs) + " " + std::string(to_string(t.op)) + " " + format_operand(t.rhs);
  }
  return out;
}

std::string format_statement(const Statement& s) { return std::visit(StatementFormatter{}, s); }

std::string format(const ScriptModule& m) {
  std::string out;
  std::size_t covered = 0;
  for (std::size_t r = 0; r < m.regions.size(); ++r) {
    const auto& region = m.regions[r];
    if (r) out += "\n";
    out += "#-- region: " + region.label + "\n";
    for (std::size_t i = region.begin; i < region.end && i < m.statements.size(); ++i)
      out += format_statement(m.statements[i]);
    covered = std::max(covered, region.end);
  }
  for (std::size_t i = covered; i < m.statements.size(); ++i) out += format_statement(m.statements[i]);
  return out;
}

}  // namespace arise::dsl
