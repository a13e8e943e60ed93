#include "arise/exec/executor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <functional>
#include <random>

#include "arise/dsl/format.hpp"

namespace arise::exec {

using namespace arise::dsl;

namespace {

constexpr double kAccel = 3.0;             // m/s^2 for follow_lane/accelerate
constexpr double kMaxBrakeDecel = 8.0;     // m/s^2 at brake(1)
constexpr double kLaneChangeSeconds = 2.0;
constexpr double kSidewalkMargin = 2.5;    // pedestrians and props may stand off the lane strip
constexpr double kConnectGap = 0.5;        // successor starts closer than this are joined directly
constexpr double kTurnThreshold = kPi / 4;
constexpr int kMaxNameDepth = 8;

double default_speed(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::car: return 10.0;
    case ObjectKind::truck: return 8.0;
    case ObjectKind::bicycle: return 4.0;
    case ObjectKind::pedestrian: return 1.2;
    case ObjectKind::static_prop: return 0.0;
  }
  return 0.0;
}

/// Runtime error raised while simulating; becomes an execute-phase diagnostic.
struct ScriptFault {
  ExecutionStatus status;
  std::string code;
  std::string message;
  std::vector<std::string> trace;
  SourceSpan span;
};

struct RtValue {
  enum class Kind { number, direction, text, object, color, boolean };
  Kind kind = Kind::number;
  double number = 0;
  Direction direction = Direction::straight;
  std::string text;

  static RtValue num(double d) { return {Kind::number, d, Direction::straight, {}}; }
  static RtValue dir(Direction d) { return {Kind::direction, 0, d, {}}; }
  static RtValue str(Kind k, std::string s) { return {k, 0, Direction::straight, std::move(s)}; }

  std::string show() const {
    switch (kind) {
      case Kind::number: return util_number(number);
      case Kind::direction: return std::string(to_string(direction));
      case Kind::boolean: return number != 0 ? "true" : "false";
      default: return text;
    }
  }
  static std::string util_number(double d) {
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", d);
    return buf;
  }
};

using Bindings = std::map<std::string, RtValue, std::less<>>;

struct Frame {
  const std::vector<Action>* actions = nullptr;
  std::size_t pc = 0;
  double elapsed = 0;
  bool started = false;
};

struct BehaviorRun {
  std::string name;
  const BehaviorDef* def = nullptr;  // null for built-ins
  std::vector<Action> builtin_actions;
  Bindings bindings;
  Frame main;
  std::optional<Frame> interrupt;
  std::size_t interrupt_index = 0;
};

struct Agent {
  const ObjectDef* def = nullptr;
  Footprint fp{};
  Vec2 pos;
  double heading = 0;
  double speed = 0;

  // Path following: a lane, a synthetic connector towards a successor, or free
  // straight-line motion when the object is not aligned with any lane.
  const Lane* lane = nullptr;
  bool on_connector = false;
  Polyline connector;
  const Lane* connector_target = nullptr;
  double s = 0;
  double lateral = 0;
  std::optional<int> turn_target;
  bool at_dead_end = false;

  bool changing_lane = false;
  const Lane* change_target = nullptr;
  double change_offset = 0;
  double change_start_lateral = 0;

  std::optional<BehaviorRun> behavior;
  double min_distance = std::numeric_limits<double>::infinity();
  bool collided = false;

  const Polyline* path() const {
    if (on_connector) return &connector;
    return lane ? &lane->centerline : nullptr;
  }

  void refresh_pose() {
    const Polyline* p = path();
    if (!p) return;
    double h = p->heading_at(s);
    pos = p->point_at(s) + left_normal(unit_from_heading(h)) * lateral;
    heading = h;
  }

  OrientedBox box() const { return {pos, heading, fp.length, fp.width}; }
};

struct Snapshot {
  Vec2 pos;
  double speed;
  int lane;
};

std::string action_text(const Action& a) {
  std::string s(to_string(a.kind));
  s += "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ", ";
    s += format_value(a.args[i]);
  }
  return s + ")";
}

class Simulation {
 public:
  Simulation(const ScriptModule& m, const RoadNetwork& net, const ExecutionLimits& limits)
      : m_(m), net_(net), limits_(limits), rng_(limits.seed) {}

  ExecutionResult run() {
    ExecutionResult result;
    try {
      build_agents();
      result.spawn_attempts_used = spawn();
      if (result.spawn_attempts_used < 0) {
        result.spawn_attempts_used = limits_.max_spawn_attempts;
        result.status = ExecutionStatus::spawn_failure;
        result.diagnostics.push_back(spawn_failure_diagnostic());
        summarize(result);
        return result;
      }
      observe_distances();
      check_requirements(0);
      for (int tick = 1; tick <= limits_.sim_steps; ++tick) step(tick);
      result.status = ExecutionStatus::success;
    } catch (const ScriptFault& f) {
      result.status = f.status;
      if (result.spawn_attempts_used <= 0) result.spawn_attempts_used = attempts_so_far_;
      Diagnostic d;
      d.phase = Phase::execute;
      d.code = f.code;
      d.message = f.message;
      d.span = f.span;
      d.trace = f.trace.empty() ? std::vector<std::string>{"executor"} : f.trace;
      result.diagnostics.push_back(std::move(d));
    }
    summarize(result);
    return result;
  }

 private:
  // --- randomness -------------------------------------------------------
  double uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  // --- value resolution -------------------------------------------------
  RtValue resolve(const Value& v, const Bindings* bindings, const Agent* self, int depth = 0) const {
    if (const double* d = v.number()) return RtValue::num(*d);
    if (const auto* s = std::get_if<std::string>(&v.data)) return RtValue::str(RtValue::Kind::text, *s);
    if (const auto* b = std::get_if<bool>(&v.data)) {
      RtValue r = RtValue::num(*b ? 1 : 0);
      r.kind = RtValue::Kind::boolean;
      return r;
    }
    if (const auto* d = v.direction()) return RtValue::dir(*d);
    const std::string& id = v.name()->id;
    if (bindings) {
      if (auto it = bindings->find(id); it != bindings->end()) return it->second;
    }
    if (id == "self" && self) return RtValue::str(RtValue::Kind::object, self->def->name);
    if (const auto* p = m_.find_param(id); p && depth < kMaxNameDepth)
      return resolve(p->value, nullptr, self, depth + 1);
    if (m_.find_object(id)) return RtValue::str(RtValue::Kind::object, id);
    if (id == "inf") return RtValue::num(std::numeric_limits<double>::infinity());
    if (id == "straight") return RtValue::dir(Direction::straight);
    if (id == "red" || id == "green" || id == "yellow") return RtValue::str(RtValue::Kind::color, id);
    throw ScriptFault{ExecutionStatus::runtime_error, "exec.behavior_error", "name '" + id + "' is not defined",
                      {"while resolving '" + id + "'"}, v.loc.span};
  }

  double resolve_number(const Value& v, const Bindings* b, const Agent* self, std::string_view what,
                        const std::vector<std::string>& trace) const {
    RtValue r = resolve(v, b, self);
    if (r.kind != RtValue::Kind::number)
      throw ScriptFault{ExecutionStatus::runtime_error, "exec.behavior_error",
                        std::string(what) + " must be a number, got '" + r.show() + "'", trace, v.loc.span};
    return r.number;
  }

  // --- construction and spawn ---------------------------------------------
  void build_agents() {
    auto objects = m_.objects();
    for (const auto* o : objects) {
      Agent a;
      a.def = o;
      a.fp = footprint(o->kind);
      agents_.push_back(std::move(a));
    }
    // Placement order: references first, declaration order otherwise.
    std::vector<int> state(agents_.size(), 0);
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
      if (state[i]) return;
      state[i] = 1;
      if (const auto& ref = agents_[i].def->placement.reference) {
        if (auto j = index_of(*ref); j && state[*j] == 0) visit(*j);
      }
      state[i] = 2;
      order_.push_back(i);
    };
    for (std::size_t i = 0; i < agents_.size(); ++i) visit(i);
  }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < agents_.size(); ++i)
      if (agents_[i].def->name == name) return i;
    return std::nullopt;
  }

  Agent* find_agent(std::string_view name) {
    auto i = index_of(name);
    return i ? &agents_[*i] : nullptr;
  }

  std::vector<std::string> object_trace(const Agent& a) const {
    return {"object '" + a.def->name + "' (" + std::string(to_string(a.def->kind)) + ")"};
  }

  /// Returns the attempt number that succeeded, or -1 when the budget ran out.
  int spawn() {
    for (int attempt = 1; attempt <= limits_.max_spawn_attempts; ++attempt) {
      attempts_so_far_ = attempt;
      auto reason = try_place();
      if (!reason) return attempt;
      rejections_.push_back("spawn attempt " + std::to_string(attempt) + ": " + *reason);
    }
    return -1;
  }

  Diagnostic spawn_failure_diagnostic() const {
    Diagnostic d;
    d.phase = Phase::execute;
    d.code = "exec.spawn_exhausted";
    d.message = "could not place all objects within " + std::to_string(limits_.max_spawn_attempts) +
                " spawn attempts";
    if (last_rejected_) d.span = last_rejected_->def->loc.span;
    d.trace = rejections_;
    return d;
  }

  std::optional<std::string> try_place() {
    for (std::size_t k = 0; k < order_.size(); ++k) {
      Agent& a = agents_[order_[k]];
      if (auto reason = place(a)) {
        last_rejected_ = &a;
        return reason;
      }
      for (std::size_t j = 0; j < k; ++j) {
        const Agent& other = agents_[order_[j]];
        if (overlaps(a.box(), other.box())) {
          last_rejected_ = &a;
          return "object '" + a.def->name + "' overlaps '" + other.def->name + "'";
        }
      }
    }
    return std::nullopt;
  }

  std::optional<std::string> place(Agent& a) {
    const ObjectDef& o = *a.def;
    const PlacementExpr& p = o.placement;
    auto trace = object_trace(a);
    a.lane = nullptr;
    a.on_connector = false;
    a.lateral = 0;
    a.changing_lane = false;
    a.turn_target.reset();
    a.at_dead_end = false;
    std::optional<double> facing;
    if (p.heading) facing = deg_to_rad(resolve_number(*p.heading, nullptr, nullptr, "facing", trace));

    switch (p.anchor) {
      case Anchor::on_lane: {
        const Lane* lane = nullptr;
        if (p.lane) {
          double id = resolve_number(*p.lane, nullptr, nullptr, "lane", trace);
          lane = std::floor(id) == id ? net_.find_lane(static_cast<int>(id)) : nullptr;
          if (!lane)
            throw ScriptFault{ExecutionStatus::runtime_error, "exec.off_road",
                              "map '" + net_.name + "' has no lane " + RtValue::util_number(id), trace,
                              p.loc.span};
        } else {
          if (net_.lanes.empty())
            throw ScriptFault{ExecutionStatus::runtime_error, "exec.off_road",
                              "map '" + net_.name + "' has no lanes", trace, p.loc.span};
          auto idx = static_cast<std::size_t>(uniform01() * static_cast<double>(net_.lanes.size()));
          lane = &net_.lanes[std::min(idx, net_.lanes.size() - 1)];
        }
        double s = uniform01() * lane->centerline.length();
        a.pos = lane->centerline.point_at(s);
        a.heading = facing.value_or(lane->centerline.heading_at(s));
        break;
      }
      case Anchor::absolute_point: {
        a.pos = {resolve_number((*p.point)[0], nullptr, nullptr, "x", trace),
                 resolve_number((*p.point)[1], nullptr, nullptr, "y", trace)};
        auto hit = net_.locate(a.pos, kSidewalkMargin);
        a.heading = facing.value_or(hit ? hit->lane->centerline.heading_at(hit->projection.s) : 0.0);
        break;
      }
      case Anchor::relative: {
        const Agent* ref = find_agent(*p.reference);
        if (!ref)
          throw ScriptFault{ExecutionStatus::runtime_error, "exec.behavior_error",
                            "reference object '" + *p.reference + "' does not exist", trace, p.loc.span};
        double d = p.distance ? resolve_number(*p.distance, nullptr, nullptr, "distance", trace)
                              : (*p.relation == Relation::ahead_of || *p.relation == Relation::behind ? 10.0 : 3.5);
        Vec2 fwd = unit_from_heading(ref->heading);
        Vec2 left = left_normal(fwd);
        switch (*p.relation) {
          case Relation::ahead_of: a.pos = ref->pos + fwd * d; break;
          case Relation::behind: a.pos = ref->pos - fwd * d; break;
          case Relation::left_of: a.pos = ref->pos + left * d; break;
          case Relation::right_of: a.pos = ref->pos - left * d; break;
        }
        a.heading = facing.value_or(ref->heading);
        break;
      }
    }

    bool walker = o.kind == ObjectKind::pedestrian || o.kind == ObjectKind::static_prop;
    if (!net_.locate(a.pos, walker ? kSidewalkMargin : 0.0))
      return "object '" + o.name + "' is off road";
    if (auto hit = net_.locate(a.pos, walker ? kSidewalkMargin : 0.0, a.heading)) {
      a.lane = hit->lane;
      a.s = hit->projection.s;
      a.lateral = hit->projection.lateral;
      a.refresh_pose();
      if (facing) a.heading = *facing;
    }

    a.speed = 0;
    a.behavior.reset();
    if (o.behavior) {
      a.behavior = make_behavior(a, *o.behavior);
      a.speed = initial_speed(a);
    }
    for (const auto& attr : o.attributes) {
      if (attr.name == "speed") {
        a.speed = resolve_number(attr.value, nullptr, nullptr, "speed", trace);
        if (a.speed < 0)
          throw ScriptFault{ExecutionStatus::runtime_error, "exec.behavior_error", "initial speed is negative",
                            trace, attr.value.loc.span};
      }
    }
    if (o.kind == ObjectKind::static_prop) a.speed = 0;
    return std::nullopt;
  }

  // Objects start at the cruising speed of their first action.
  double initial_speed(const Agent& a) const {
    const BehaviorRun& b = *a.behavior;
    const auto& actions = b.def ? b.def->actions : b.builtin_actions;
    if (!actions.empty()) {
      const Action& first = actions.front();
      if (first.kind == ActionKind::follow_lane && !first.args.empty()) {
        RtValue v = resolve(first.args[0], &b.bindings, &a);
        if (v.kind == RtValue::Kind::number && v.number >= 0 && std::isfinite(v.number)) return v.number;
      }
    }
    return default_speed(a.def->kind);
  }

  BehaviorRun make_behavior(const Agent& a, const BehaviorCall& call) const {
    BehaviorRun run;
    run.name = call.name;
    auto trace = object_trace(a);
    trace.push_back("behavior '" + call.name + "'");
    if (const auto* def = m_.find_behavior(call.name)) {
      run.def = def;
      if (def->params.size() != call.args.size())
        throw ScriptFault{ExecutionStatus::runtime_error, "exec.behavior_error",
                          "behavior '" + call.name + "' called with wrong number of arguments", trace, call.loc.span};
      for (std::size_t i = 0; i < call.args.size(); ++i)
        run.bindings[def->params[i].name] = resolve(call.args[i], nullptr, &a);
      run.main.actions = &def->actions;
    } else if (call.name == "FollowLaneBehavior" && call.args.size() == 1) {
      Action follow;
      follow.kind = ActionKind::follow_lane;
      follow.args = call.args;
      follow.loc = call.loc;
      run.builtin_actions.push_back(std::move(follow));
    } else if (call.name == "WaitBehavior" && call.args.empty()) {
      Action wait;
      wait.kind = ActionKind::wait;
      wait.loc = call.loc;
      run.builtin_actions.push_back(std::move(wait));
    } else {
      throw ScriptFault{ExecutionStatus::runtime_error, "exec.behavior_error",
                        "behavior '" + call.name + "' is not defined", trace, call.loc.span};
    }
    return run;
  }

  // --- simulation -------------------------------------------------------
  void step(int tick) {
    tick_ = tick;
    snapshot_.clear();
    for (const auto& a : agents_) snapshot_.push_back({a.pos, a.speed, lane_of(a)});
    in_behaviors_ = true;
    for (auto& a : agents_) {
      if (!a.behavior) continue;
      if (!a.behavior->main.actions) a.behavior->main.actions = &a.behavior->builtin_actions;
      step_behavior(a);
    }
    in_behaviors_ = false;
    for (auto& a : agents_) move(a);
    observe_distances();
    check_requirements(tick);
  }

  static int lane_of(const Agent& a) {
    if (a.lane && !a.on_connector) return a.lane->id;
    return -1;
  }

  std::vector<std::string> tick_trace(const Agent& a, const std::string& action_frame) const {
    std::vector<std::string> t;
    char buf[64];
    std::snprintf(buf, sizeof buf, "tick %d (t=%.1fs)", tick_, tick_ * limits_.step_dt);
    t.emplace_back(buf);
    auto obj = object_trace(a);
    t.insert(t.end(), obj.begin(), obj.end());
    if (a.behavior) t.push_back("behavior '" + a.behavior->name + "'");
    if (!action_frame.empty()) t.push_back(action_frame);
    return t;
  }

  void step_behavior(Agent& a) {
    BehaviorRun& b = *a.behavior;
    if (!b.interrupt && b.def) {
      for (std::size_t i = 0; i < b.def->interrupts.size(); ++i) {
        const auto& in = b.def->interrupts[i];
        if (eval(in.when, &b.bindings, &a, tick_trace(a, "interrupt #" + std::to_string(i + 1) + " condition"))) {
          b.interrupt = Frame{&in.actions, 0, 0, false};
          b.interrupt_index = i;
          break;
        }
      }
    }
    Frame& f = b.interrupt ? *b.interrupt : b.main;
    if (f.pc >= f.actions->size()) {
      if (b.interrupt) b.interrupt.reset();
      return;  // body finished: keep current speed
    }
    const Action& act = (*f.actions)[f.pc];
    std::string frame = (b.interrupt ? "interrupt #" + std::to_string(b.interrupt_index + 1) + " " : std::string()) +
                        "action #" + std::to_string(f.pc + 1) + " " + action_text(act);
    bool done = run_action(a, act, f, tick_trace(a, frame));
    if (done) {
      ++f.pc;
      f.elapsed = 0;
      f.started = false;
      if (b.interrupt && f.pc >= f.actions->size()) b.interrupt.reset();
    }
  }

  double arg_number(const Agent& a, const Action& act, std::size_t i, const std::vector<std::string>& trace) const {
    return resolve_number(act.args[i], &a.behavior->bindings, &a, std::string(to_string(act.kind)) + " argument",
                          trace);
  }

  Direction arg_direction(const Agent& a, const Action& act, const std::vector<std::string>& trace) const {
    RtValue r = resolve(act.args.at(0), &a.behavior->bindings, &a);
    if (r.kind != RtValue::Kind::direction)
      throw ScriptFault{ExecutionStatus::runtime_error, "exec.behavior_error",
                        std::string(to_string(act.kind)) + " needs a direction, got '" + r.show() + "'", trace,
                        act.loc.span};
    return r.direction;
  }

  [[noreturn]] void behavior_error(const std::string& msg, const std::vector<std::string>& trace,
                                   const Action& act, std::string code = "exec.behavior_error") const {
    throw ScriptFault{ExecutionStatus::runtime_error, std::move(code), msg, trace, act.loc.span};
  }

  void approach(Agent& a, double target, double rate) const {
    double dv = rate * limits_.step_dt;
    if (a.speed < target) a.speed = std::min(target, a.speed + dv);
    else a.speed = std::max(target, a.speed - dv);
  }

  bool run_action(Agent& a, const Action& act, Frame& f, const std::vector<std::string>& trace) {
    const double dt = limits_.step_dt;
    bool first = !f.started;
    f.started = true;
    switch (act.kind) {
      case ActionKind::follow_lane: {
        double target = arg_number(a, act, 0, trace);
        if (target < 0 || std::isinf(target)) behavior_error("follow_lane speed must be finite and >= 0", trace, act);
        approach(a, target, kAccel);
        f.elapsed += dt;
        if (act.args.size() > 1) {
          double duration = arg_number(a, act, 1, trace);
          if (duration < 0) behavior_error("follow_lane duration must be >= 0", trace, act);
          return f.elapsed >= duration - 1e-9;
        }
        return false;
      }
      case ActionKind::accelerate: {
        double target = arg_number(a, act, 0, trace);
        if (target < 0 || std::isinf(target)) behavior_error("accelerate target must be finite and >= 0", trace, act);
        approach(a, target, kAccel);
        return std::fabs(a.speed - target) < 1e-9;
      }
      case ActionKind::brake: {
        double intensity = arg_number(a, act, 0, trace);
        if (!(intensity > 0 && intensity <= 1)) behavior_error("brake intensity must be in (0, 1]", trace, act);
        a.speed = std::max(0.0, a.speed - intensity * kMaxBrakeDecel * dt);
        return a.speed == 0.0;
      }
      case ActionKind::wait: {
        double duration = act.args.empty() ? std::numeric_limits<double>::infinity() : arg_number(a, act, 0, trace);
        if (duration < 0) behavior_error("wait duration must be >= 0", trace, act);
        a.speed = 0;
        f.elapsed += dt;
        return f.elapsed >= duration - 1e-9;
      }
      case ActionKind::lane_change: {
        if (first) start_lane_change(a, arg_direction(a, act, trace), act, trace);
        f.elapsed += dt;
        double progress = std::min(1.0, f.elapsed / kLaneChangeSeconds);
        a.lateral = a.change_start_lateral + (a.change_offset - a.change_start_lateral) * progress;
        if (progress < 1.0) return false;
        finish_lane_change(a, act, trace);
        return true;
      }
      case ActionKind::turn: {
        if (first) start_turn(a, arg_direction(a, act, trace), act, trace);
        return !a.turn_target || (a.lane && !a.on_connector && a.lane->id == *a.turn_target);
      }
    }
    return true;
  }

  void start_lane_change(Agent& a, Direction dir, const Action& act, const std::vector<std::string>& trace) {
    if (dir == Direction::straight) behavior_error("lane_change needs 'left' or 'right'", trace, act);
    if (!a.lane || a.on_connector) behavior_error("lane_change requires the object to be on a lane", trace, act);
    Vec2 left = left_normal(unit_from_heading(a.heading));
    double sign = dir == Direction::left ? 1.0 : -1.0;
    Vec2 probe = a.pos + left * (sign * a.lane->width);
    auto hit = net_.locate(probe, 0.0, a.heading);
    if (!hit || hit->lane == a.lane)
      behavior_error("no lane to the " + std::string(to_string(dir)) + " of lane " + std::to_string(a.lane->id),
                     trace, act, "exec.off_road");
    a.changing_lane = true;
    a.change_target = hit->lane;
    a.change_start_lateral = a.lateral;
    Vec2 target_point = hit->lane->centerline.point_at(hit->projection.s);
    a.change_offset = a.lateral + dot(target_point - a.pos, left);
  }

  void finish_lane_change(Agent& a, const Action& act, const std::vector<std::string>& trace) {
    a.refresh_pose();
    auto proj = a.change_target->centerline.project(a.pos);
    if (!proj.within)
      behavior_error("lane change ran past the end of lane " + std::to_string(a.change_target->id), trace, act,
                     "exec.off_road");
    a.lane = a.change_target;
    a.on_connector = false;
    a.s = proj.s;
    a.lateral = 0;
    a.changing_lane = false;
    a.change_target = nullptr;
    a.refresh_pose();
  }

  static double turn_angle(const Lane& from, const Lane& to) {
    double out = from.centerline.heading_at(from.centerline.length());
    double in = to.centerline.heading_at(0);
    return wrap_angle(in - out);
  }

  static bool matches(Direction dir, double angle) {
    switch (dir) {
      case Direction::straight: return std::fabs(angle) <= kTurnThreshold;
      case Direction::left: return angle > kTurnThreshold && angle < kPi - kTurnThreshold;
      case Direction::right: return angle < -kTurnThreshold && angle > -kPi + kTurnThreshold;
    }
    return false;
  }

  void start_turn(Agent& a, Direction dir, const Action& act, const std::vector<std::string>& trace) {
    const Lane* decision = a.on_connector ? a.connector_target : a.lane;
    if (!decision) behavior_error("turn requires the object to be on a lane", trace, act);
    for (int succ : decision->successors) {
      const Lane* next = net_.find_lane(succ);
      if (next && matches(dir, turn_angle(*decision, *next))) {
        if (a.on_connector) {
          // Already committed to this connector; the turn applies at the next junction.
          a.turn_target = next->id;
          return;
        }
        a.turn_target = next->id;
        return;
      }
    }
    behavior_error("lane " + std::to_string(decision->id) + " offers no " + std::string(to_string(dir)) + " turn",
                   trace, act);
  }

  const Lane* choose_successor(Agent& a) const {
    const Lane* best = nullptr;
    double best_angle = std::numeric_limits<double>::infinity();
    for (int succ : a.lane->successors) {
      const Lane* next = net_.find_lane(succ);
      if (!next) continue;
      if (a.turn_target && next->id == *a.turn_target) return next;
      double angle = std::fabs(turn_angle(*a.lane, *next));
      if (angle < best_angle) {
        best_angle = angle;
        best = next;
      }
    }
    return best;
  }

  void move(Agent& a) {
    double dist = a.speed * limits_.step_dt;
    if (dist <= 0) {
      a.refresh_pose();
      return;
    }
    if (!a.path()) {
      a.pos = a.pos + unit_from_heading(a.heading) * dist;
      return;
    }
    a.s += dist;
    for (int guard = 0; guard < 64; ++guard) {
      double len = a.path()->length();
      if (a.s <= len) break;
      double overflow = a.s - len;
      if (a.on_connector) {
        a.lane = a.connector_target;
        a.on_connector = false;
        a.connector_target = nullptr;
        a.s = overflow;
        continue;
      }
      if (a.changing_lane) {
        a.s = len;  // finishing the blend resolves the position
        break;
      }
      const Lane* next = choose_successor(a);
      if (!next) {
        a.s = len;
        a.speed = 0;
        a.at_dead_end = true;
        break;
      }
      Vec2 end = a.lane->centerline.point_at(len);
      Vec2 start = next->centerline.point_at(0);
      if (norm(start - end) < kConnectGap) {
        a.lane = next;
        a.s = overflow;
      } else {
        a.connector = Polyline({end, start});
        a.connector_target = next;
        a.on_connector = true;
        a.s = overflow;
      }
    }
    a.refresh_pose();
  }

  void observe_distances() {
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      for (std::size_t j = i + 1; j < agents_.size(); ++j) {
        double d = norm(agents_[i].pos - agents_[j].pos);
        agents_[i].min_distance = std::min(agents_[i].min_distance, d);
        agents_[j].min_distance = std::min(agents_[j].min_distance, d);
        if (overlaps(agents_[i].box(), agents_[j].box())) {
          agents_[i].collided = true;
          agents_[j].collided = true;
        }
      }
    }
  }

  // --- conditions -------------------------------------------------------
  RtValue operand(const Operand& o, const Bindings* b, const Agent* self, const std::vector<std::string>& trace) const {
    auto object_named = [&](const std::string& name) -> std::size_t {
      std::string target = name;
      if (name == "self" && self) target = self->def->name;
      else if (b) {
        if (auto it = b->find(name); it != b->end() && it->second.kind == RtValue::Kind::object) target = it->second.text;
      }
      auto idx = index_of(target);
      if (!idx)
        throw ScriptFault{ExecutionStatus::runtime_error, "exec.behavior_error",
                          "object '" + name + "' does not exist", trace, o.loc.span};
      return *idx;
    };
    auto state = [&](std::size_t i) -> Snapshot {
      if (in_behaviors_ && i < snapshot_.size()) return snapshot_[i];
      const Agent& a = agents_[i];
      return {a.pos, a.speed, lane_of(a)};
    };
    switch (o.kind) {
      case Operand::Kind::value: return resolve(o.value, b, self);
      case Operand::Kind::speed: return RtValue::num(state(object_named(o.object)).speed);
      case Operand::Kind::lane: return RtValue::num(state(object_named(o.object)).lane);
      case Operand::Kind::distance:
        return RtValue::num(norm(state(object_named(o.object)).pos - state(object_named(o.other)).pos));
      case Operand::Kind::signal: {
        double idx = o.value.number() ? *o.value.number() : -1;
        if (idx < 0 || std::floor(idx) != idx || idx >= static_cast<double>(net_.signals.size()))
          throw ScriptFault{ExecutionStatus::runtime_error, "exec.behavior_error",
                            "map '" + net_.name + "' has no signal " + RtValue::util_number(idx), trace, o.loc.span};
        auto color = net_.signal_state(static_cast<std::size_t>(idx), tick_ * limits_.step_dt);
        return RtValue::str(RtValue::Kind::color, std::string(to_string(color)));
      }
    }
    return RtValue::num(0);
  }

  bool compare(const Comparison& c, const Bindings* b, const Agent* self, const std::vector<std::string>& trace) const {
    RtValue l = operand(c.lhs, b, self, trace);
    RtValue r = operand(c.rhs, b, self, trace);
    bool numeric = (l.kind == RtValue::Kind::number || l.kind == RtValue::Kind::boolean) &&
                   (r.kind == RtValue::Kind::number || r.kind == RtValue::Kind::boolean);
    if (numeric) {
      switch (c.op) {
        case CmpOp::lt: return l.number < r.number;
        case CmpOp::le: return l.number <= r.number;
        case CmpOp::gt: return l.number > r.number;
        case CmpOp::ge: return l.number >= r.number;
        case CmpOp::eq: return l.number == r.number;
        case CmpOp::ne: return l.number != r.number;
      }
    }
    bool same = l.kind == r.kind && l.show() == r.show();
    if (c.op == CmpOp::eq) return same;
    if (c.op == CmpOp::ne) return !same;
    throw ScriptFault{ExecutionStatus::runtime_error, "exec.behavior_error",
                      "cannot order '" + l.show() + "' and '" + r.show() + "'", trace, c.loc.span};
  }

  bool eval(const Condition& cond, const Bindings* b, const Agent* self, const std::vector<std::string>& trace) const {
    for (const auto& t : cond.terms)
      if (!compare(t, b, self, trace)) return false;
    return true;
  }

  void check_requirements(int tick) {
    tick_ = tick;
    for (const auto* req : m_.requirements()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "tick %d (t=%.1fs)", tick, tick * limits_.step_dt);
      std::vector<std::string> trace = {buf, "requirement '" + format_condition(req->condition) + "'"};
      if (!eval(req->condition, nullptr, nullptr, trace))
        throw ScriptFault{ExecutionStatus::requirement_violation, "exec.require_failed",
                          "requirement '" + format_condition(req->condition) + "' does not hold at tick " +
                              std::to_string(tick),
                          trace, req->loc.span};
    }
  }

  void summarize(ExecutionResult& r) const {
    r.trajectory_summary.clear();
    for (const auto& a : agents_) {
      ObjectSummary s;
      s.name = a.def->name;
      s.final_position = a.pos;
      if (std::isfinite(a.min_distance)) s.min_distance = a.min_distance;
      s.collided = a.collided;
      r.trajectory_summary.push_back(std::move(s));
    }
  }

  const ScriptModule& m_;
  const RoadNetwork& net_;
  ExecutionLimits limits_;
  std::mt19937_64 rng_;
  std::vector<Agent> agents_;
  std::vector<std::size_t> order_;
  std::vector<Snapshot> snapshot_;
  std::vector<std::string> rejections_;
  const Agent* last_rejected_ = nullptr;
  int attempts_so_far_ = 0;
  int tick_ = 0;
  bool in_behaviors_ = false;
};

}  // namespace

std::string_view to_string(ExecutionStatus s) {
  switch (s) {
    case ExecutionStatus::success: return "success";
    case ExecutionStatus::spawn_failure: return "spawn_failure";
    case ExecutionStatus::runtime_error: return "runtime_error";
    case ExecutionStatus::requirement_violation: return "requirement_violation";
  }
  return "?";
}

std::optional<ExecutionStatus> execution_status_from(std::string_view s) {
  for (auto st : {ExecutionStatus::success, ExecutionStatus::spawn_failure, ExecutionStatus::runtime_error,
                  ExecutionStatus::requirement_violation})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

Footprint footprint(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::car: return {4.5, 2.0};
    case ObjectKind::truck: return {8.0, 2.5};
    case ObjectKind::bicycle: return {1.8, 0.7};
    case ObjectKind::pedestrian: return {0.6, 0.6};
    case ObjectKind::static_prop: return {1.0, 1.0};
  }
  return {1.0, 1.0};
}

ExecutionResult execute(const ScriptModule& module, const RoadNetwork& network, const ExecutionLimits& limits) {
  return Simulation(module, network, limits).run();
}

}  // namespace arise::exec
