#include "arise/offline/heuristic.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <regex>

#include "arise/error.hpp"
#include "arise/eval/evaluator.hpp"
#include "arise/pipeline/extract.hpp"
#include "arise/pipeline/snippets.hpp"
#include "arise/repair/trl.hpp"
#include "arise/util/text.hpp"

namespace arise::offline {

namespace {

using Lines = std::vector<std::string>;

bool contains(std::string_view hay, std::string_view needle) { return hay.find(needle) != std::string_view::npos; }

std::string join(const Lines& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string fence(std::string_view body) {
  std::string b(body);
  if (!b.empty() && b.back() != '\n') b.push_back('\n');
  return "```\n" + b + "```";
}

/// Text after `heading` up to the next blank-line-separated heading, or the
/// body of the first fenced block after it when `fenced` is set.
std::string section(std::string_view text, std::string_view heading, bool fenced) {
  auto at = text.find(heading);
  if (at == std::string_view::npos) return {};
  auto rest = text.substr(at + heading.size());
  if (fenced) return util::strip_code_fence(rest);
  auto end = rest.find("\n\n");
  return std::string(util::trim(rest.substr(0, end)));
}

std::string last_user(const llm::ChatRequest& r) {
  for (auto it = r.messages.rbegin(); it != r.messages.rend(); ++it)
    if (it->role == llm::Role::user) return it->content;
  return {};
}

// ---------------------------------------------------------------- extraction

struct FieldKeywords {
  std::string_view field;
  std::vector<std::string_view> words;
};

const std::vector<FieldKeywords>& keyword_table() {
  static const std::vector<FieldKeywords> table = {
      {"behavior",
       {"brake", "cuts in", "cut in", "cuts in front", "changes lanes", "changing lanes", "lane change", "merg",
        "overtake", "ignores", "runs the red", "run the red", "drives through", "crosses", "turns left across",
        "stays stopped", "stalled", "blocks", "yield", "slows", "keeps going straight", "keeps its speed",
        "drives straight", "runs into", "negotiate", "on red"}},
      {"geometry",
       {"road", "intersection", "junction", "crossroads", "highway", "lanes in the same direction", "main road",
        "three-way", "four-way", "t-junction", "turns left", "turns right", "right turn", "left turn", "turn at"}},
      {"spawn",
       {"ahead", "behind", "adjacent", "left lane", "oncoming", "opposite direction", "cross street", "side street",
        "roadside", "next to", "in front", "from behind"}},
      {"requirements", {"must", "keep a minimum", "within", "should", "speed limit", "stay in"}},
      {"other_objects",
       {"parked", "background traffic", "cross traffic", "bus", "cones on the shoulder", "neighbouring lane",
        "sidewalk", "slow truck", "traffic waits"}},
      {"weather",
       {"rain", "fog", "night", "snow", "dusk", "sunny", "wet", "storm", "visibility", "evening", "sun", "winter"}},
  };
  return table;
}

std::vector<std::string> clauses_of(const std::string& description) {
  std::string text = util::to_lower(description);
  for (std::string_view sep : {" while ", " and then ", " and subsequently ", " and ", " as ", " where "}) {
    std::string::size_type pos;
    while ((pos = text.find(sep)) != std::string::npos) text.replace(pos, sep.size(), "|");
  }
  for (char& c : text)
    if (c == '.' || c == ',' || c == ';') c = '|';
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '|') {
      auto t = util::trim(cur);
      if (!t.empty()) out.emplace_back(t);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  auto t = util::trim(cur);
  if (!t.empty()) out.emplace_back(t);
  return out;
}

int keyword_score(const std::string& clause, const FieldKeywords& kw) {
  int score = 0;
  for (auto w : kw.words)
    if (contains(clause, w)) ++score;
  return score;
}

std::optional<std::string> best_clause(const std::vector<std::string>& clauses, const FieldKeywords& kw,
                                       const std::vector<std::string>& exclude = {}) {
  int best = 0;
  std::optional<std::string> out;
  for (const auto& c : clauses) {
    if (std::find(exclude.begin(), exclude.end(), c) != exclude.end()) continue;
    int s = keyword_score(c, kw);
    if (s > best) {
      best = s;
      out = c;
    }
  }
  return out;
}

std::optional<std::string> agent_phrase(std::string text) {
  static const std::array<std::string_view, 20> nouns = {
      "sports car", "delivery van", "heavy truck", "stalled vehicle", "stalled truck", "truck", "pedestrian",
      "child", "cyclist", "bicycle", "traffic cone", "debris", "obstacle", "bus", "van", "car", "vehicle",
      "sedan", "motorcycle", "walker"};
  for (std::string_view ego : {"ego vehicle", "ego lane"}) {
    std::string::size_type pos;
    while ((pos = text.find(ego)) != std::string::npos) text.replace(pos, ego.size(), std::string(ego.size(), '#'));
  }
  std::size_t best_pos = std::string::npos;
  std::string_view best_noun;
  for (auto n : nouns) {
    auto pos = text.find(n);
    if (pos < best_pos) {
      best_pos = pos;
      best_noun = n;
    }
  }
  if (best_pos == std::string::npos) return std::nullopt;
  auto head = text.substr(0, best_pos);
  std::size_t start = 0;
  for (std::string_view article : {"a ", "an ", "the "}) {
    auto p = head.rfind(" " + std::string(article));
    if (p != std::string::npos && p + 1 >= start) start = std::max(start, p + 1);
    if (head.rfind(article, 0) == 0) start = std::max<std::size_t>(start, 0);
  }
  auto phrase = text.substr(start, best_pos + best_noun.size() - start);
  return std::string(util::trim(phrase));
}

// -------------------------------------------------------------------- repair

const std::regex kBehaviorDef(R"(^behavior\s+(\w+)\s*\(([^)]*)\))");
const std::regex kObjectDef(R"(^(\w+)\s*=\s*new\s+(\w+)\s*(.*)$)");
const std::regex kParamDef(R"(^param\s+(\w+)\s*=\s*(.+)$)");
const std::regex kDiagnostic(R"(^\[(\w+)/([\w.]+)\]\s(.*?)(?:\s@\s(\d+):(\d+))?$)");

struct Diag {
  std::string code;
  std::string message;
  int line = 0;  // 1-based, 0 when absent
  std::vector<std::string> trace;
};

std::optional<Diag> parse_first_diagnostic(const std::string& rendered) {
  auto lines = util::split_lines(rendered);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::smatch m;
    if (!std::regex_match(lines[i], m, kDiagnostic)) continue;
    Diag d;
    d.code = m[2];
    d.message = m[3];
    if (m[4].matched) d.line = std::stoi(m[4]);
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      auto t = util::trim(lines[j]);
      if (t.rfind("at ", 0) == 0) {
        d.trace.emplace_back(t.substr(3));
      } else if (t.rfind("| ", 0) != 0 && t != "|") {
        break;
      }
    }
    return d;
  }
  return std::nullopt;
}

std::vector<std::string> quoted(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto a = s.find('\'', pos);
    if (a == std::string_view::npos) break;
    auto b = s.find('\'', a + 1);
    if (b == std::string_view::npos) break;
    out.emplace_back(s.substr(a + 1, b - a - 1));
    pos = b + 1;
  }
  return out;
}

std::string nearest(const std::string& target, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto& c : candidates) {
    if (c == target) continue;
    auto d = edit_distance(util::to_lower(target), util::to_lower(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Replaces whole-word occurrences of `from` in `line`.
bool replace_word(std::string& line, const std::string& from, const std::string& to) {
  bool changed = false;
  std::size_t pos = 0;
  while ((pos = line.find(from, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || !is_ident(line[pos - 1]);
    bool right_ok = pos + from.size() >= line.size() || !is_ident(line[pos + from.size()]);
    if (left_ok && right_ok) {
      line.replace(pos, from.size(), to);
      pos += to.size();
      changed = true;
    } else {
      pos += from.size();
    }
  }
  return changed;
}

/// Renames an object that is defined but never referenced to `ego`.
bool rename_orphan_to_ego(Lines& lines) {
  static const std::regex def(R"(^(\w+)\s*=\s*new\b)");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::smatch m;
    if (!std::regex_search(lines[i], m, def) || m[1] == "ego") continue;
    std::string name = m[1];
    bool used = false;
    for (std::size_t j = 0; j < lines.size() && !used; ++j) {
      if (j == i) continue;
      std::string probe = lines[j];
      used = replace_word(probe, name, name);
    }
    if (used) continue;
    replace_word(lines[i], name, "ego");
    return true;
  }
  return false;
}

std::string indent_of(const std::string& line) { return line.substr(0, line.find_first_not_of(' ')); }

bool top_level(const std::string& line) { return !line.empty() && line[0] != ' ' && line[0] != '#'; }

std::vector<std::string> behavior_names(const Lines& lines, bool with_builtins) {
  std::vector<std::string> out;
  for (const auto& l : lines) {
    std::smatch m;
    if (std::regex_search(l, m, kBehaviorDef)) out.push_back(m[1]);
  }
  if (with_builtins) {
    out.emplace_back("FollowLaneBehavior");
    out.emplace_back("WaitBehavior");
  }
  return out;
}

std::vector<std::string> object_names(const Lines& lines) {
  std::vector<std::string> out;
  for (const auto& l : lines) {
    std::smatch m;
    if (std::regex_match(l, m, kObjectDef)) out.push_back(m[1]);
  }
  return out;
}

std::optional<std::string> param_value(const Lines& lines, const std::string& name) {
  for (const auto& l : lines) {
    std::smatch m;
    if (std::regex_match(l, m, kParamDef) && m[1] == name) return std::string(util::trim(std::string(m[2])));
  }
  return std::nullopt;
}

std::optional<double> number(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (...) {
  }
  return std::nullopt;
}

/// Index of the top-level statement containing line `idx`.
std::size_t statement_start(const Lines& lines, std::size_t idx) {
  while (idx > 0 && !top_level(lines[idx])) --idx;
  return idx;
}

/// One past the last line of the block opened at `idx`.
std::size_t block_end(const Lines& lines, std::size_t idx) {
  auto base = indent_of(lines[idx]).size();
  std::size_t end = idx + 1;
  while (end < lines.size() && !util::trim(lines[end]).empty() && indent_of(lines[end]).size() > base) ++end;
  return end;
}

std::string enclosing_speed_arg(const Lines& lines, std::size_t idx) {
  auto start = statement_start(lines, idx);
  std::smatch m;
  if (std::regex_search(lines[start], m, kBehaviorDef) && contains(std::string(m[2]), "speed")) return "speed";
  return "10";
}

std::string follow_lane_line(const Lines& lines, std::size_t idx) {
  return indent_of(lines[idx]) + "do follow_lane(" + enclosing_speed_arg(lines, idx) + ")";
}

std::string default_value(const std::string& name) {
  auto upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (contains(upper, "SPEED")) return "10";
  if (contains(upper, "DIST") || contains(upper, "GAP")) return "20";
  if (contains(upper, "BLUEPRINT")) return "\"vehicle.sedan\"";
  return "1";
}

/// Generic fallback: neutralise the offending line without touching ego.
bool neutralise(Lines& lines, std::size_t idx) {
  if (idx >= lines.size()) return false;
  auto t = std::string(util::trim(lines[idx]));
  if (t.empty() || t.rfind("#--", 0) == 0) return false;
  if (t.rfind("do ", 0) == 0) {
    auto replacement = follow_lane_line(lines, idx);
    if (replacement == lines[idx]) return false;
    lines[idx] = replacement;
    return true;
  }
  if (t.rfind("interrupt when", 0) == 0 || t.rfind("behavior ", 0) == 0) {
    lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(idx),
                lines.begin() + static_cast<std::ptrdiff_t>(block_end(lines, idx)));
    return true;
  }
  if (t.rfind("model ", 0) == 0 || t.rfind("param map", 0) == 0) return false;
  std::smatch m;
  if (std::regex_match(t, m, kObjectDef) && m[1] == "ego") return false;
  if (!top_level(lines[idx])) {
    auto start = statement_start(lines, idx);
    return neutralise(lines, start);
  }
  lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(idx));
  return true;
}

std::string rotate_direction(const std::string& d) {
  if (d == "right") return "left";
  if (d == "left") return "straight";
  return "right";
}

bool fix_turn(Lines& lines, std::size_t idx, const Diag& d) {
  static const std::regex literal(R"(turn\((left|right|straight)\))");
  std::smatch m;
  if (std::regex_search(lines[idx], m, literal)) {
    lines[idx] = std::regex_replace(lines[idx], literal, "turn(" + rotate_direction(m[1]) + ")");
    return true;
  }
  // Direction passed in as an argument: rotate the literal at the call site.
  std::string behavior;
  for (const auto& frame : d.trace)
    if (auto q = quoted(frame); frame.rfind("behavior ", 0) == 0 && !q.empty()) behavior = q.front();
  if (!behavior.empty()) {
    static const std::regex dir_arg(R"(\b(left|right|straight)\b)");
    for (auto& l : lines) {
      if (!top_level(l) || !contains(l, "behavior " + behavior + "(") || l.rfind("behavior ", 0) == 0) continue;
      auto call = l.find(behavior + "(");
      std::string head = l.substr(0, call), tail = l.substr(call);
      if (std::regex_search(tail, m, dir_arg)) {
        tail = tail.substr(0, static_cast<std::size_t>(m.position(0))) + rotate_direction(m[1]) +
               tail.substr(static_cast<std::size_t>(m.position(0) + m.length(0)));
        l = head + tail;
        return true;
      }
    }
  }
  static const std::regex any_turn(R"(turn\(\w+\))");
  if (std::regex_search(lines[idx], any_turn)) {
    lines[idx] = std::regex_replace(lines[idx], any_turn, "turn(left)");
    return true;
  }
  return false;
}

bool fix_spawn(Lines& lines, std::size_t idx, const Diag& d) {
  std::smatch m;
  if (!std::regex_match(lines[idx], m, kObjectDef)) return false;
  std::string name = m[1];
  bool off_road = !d.trace.empty() && contains(d.trace.back(), "off road");
  static const std::regex by(R"(\bby\s+([\w.]+))");
  static const std::regex lateral(R"((left|right) of (\w+) by [\w.]+)");
  std::smatch b;
  if (off_road && std::regex_search(lines[idx], b, lateral) && name != "ego") {
    lines[idx] = std::regex_replace(lines[idx], lateral, "ahead of $2 by 30", std::regex_constants::format_first_only);
    return true;
  }
  if (std::regex_search(lines[idx], b, by)) {
    std::string arg = b[1];
    auto v = number(arg);
    if (!v) {
      if (auto p = param_value(lines, arg)) v = number(*p);
    }
    double next = v ? std::max(*v * 2.0, *v + 20.0) : 40.0;
    if (off_road && v) next = std::max(5.0, *v / 2.0);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", next);
    lines[idx] = std::regex_replace(lines[idx], by, std::string("by ") + buf, std::regex_constants::format_first_only);
    return true;
  }
  static const std::regex on_lane(R"(on lane\((\d+)\))");
  if (name != "ego" && std::regex_search(lines[idx], b, on_lane)) {
    lines[idx] = std::regex_replace(lines[idx], on_lane, "ahead of ego by 40", std::regex_constants::format_first_only);
    return true;
  }
  return false;
}

std::vector<std::string> behavior_param_types(const Lines& lines, const std::string& behavior) {
  for (const auto& l : lines) {
    std::smatch m;
    if (std::regex_search(l, m, kBehaviorDef) && m[1] == behavior) {
      std::vector<std::string> types;
      std::string params = m[2];
      std::size_t pos = 0;
      while ((pos = params.find(':', pos)) != std::string::npos) {
        auto end = params.find(',', pos);
        types.emplace_back(util::trim(std::string_view(params).substr(pos + 1, end == std::string::npos ? std::string::npos : end - pos - 1)));
        pos = pos + 1;
      }
      return types;
    }
  }
  if (behavior == "FollowLaneBehavior") return {"number"};
  return {};
}

bool fix_behavior_arity(Lines& lines, std::size_t idx, const std::string& behavior) {
  auto& line = lines[idx];
  auto open = line.find(behavior + "(");
  if (open == std::string::npos) return false;
  open += behavior.size();
  auto close = line.find(')', open);
  if (close == std::string::npos) return false;
  std::vector<std::string> args;
  std::string inner = line.substr(open + 1, close - open - 1);
  std::size_t pos = 0;
  while (!util::trim(inner).empty()) {
    auto comma = inner.find(',', pos);
    args.emplace_back(util::trim(std::string_view(inner).substr(0, comma)));
    if (comma == std::string::npos) break;
    inner = inner.substr(comma + 1);
  }
  auto types = behavior_param_types(lines, behavior);
  args.resize(std::min(args.size(), types.size()));
  while (args.size() < types.size()) args.emplace_back(types[args.size()] == "direction" ? "left" : "10");
  std::string joined;
  for (std::size_t i = 0; i < args.size(); ++i) joined += (i ? ", " : "") + args[i];
  line = line.substr(0, open + 1) + joined + line.substr(close);
  return true;
}

bool any_of_words(const std::string& text, std::initializer_list<std::string_view> words) {
  return std::any_of(words.begin(), words.end(), [&](std::string_view w) { return contains(text, w); });
}

// Map a description points at, among the available ones.
std::string map_from_description(const std::string& description, const std::vector<std::string>& maps) {
  auto text = util::to_lower(description);
  std::string want = "straight";
  if (contains(text, "t-junction") || contains(text, "t junction")) want = "t_junction";
  else if (any_of_words(text, {"intersection", "crossroads", "junction", "turns", "turn "})) want = "four_way";
  return std::find(maps.begin(), maps.end(), want) != maps.end() ? want : std::string();
}

std::string apply_fix(Lines lines, const Diag& d, const std::vector<std::string>& maps, const std::string& description) {
  bool has_line = d.line >= 1 && static_cast<std::size_t>(d.line) <= lines.size();
  std::size_t idx = has_line ? static_cast<std::size_t>(d.line - 1) : 0;
  auto names = quoted(d.message);
  bool changed = false;

  if (d.code == "sem.undefined_behavior" && has_line && !names.empty()) {
    auto target = nearest(names.front(), behavior_names(lines, true));
    changed = !target.empty() && replace_word(lines[idx], names.front(), target);
  } else if (d.code == "sem.arity_mismatch" && has_line && d.message.rfind("behavior '", 0) == 0 && !names.empty()) {
    changed = fix_behavior_arity(lines, idx, names.front());
  } else if (d.code == "sem.undefined_object" && has_line && !names.empty()) {
    std::smatch m;
    std::string self = std::regex_match(lines[idx], m, kObjectDef) ? std::string(m[1]) : "";
    auto objects = object_names(lines);
    objects.erase(std::remove(objects.begin(), objects.end(), self), objects.end());
    auto target = nearest(names.back(), objects);
    changed = !target.empty() && replace_word(lines[idx], names.back(), target);
  } else if (d.code == "sem.unknown_map" && has_line && !names.empty()) {
    auto target = nearest(names.front(), maps);
    // A name far from every map is not a typo; go by the description.
    if (target.empty() || edit_distance(util::to_lower(names.front()), target) > 2) {
      auto described = map_from_description(description, maps);
      if (!described.empty()) target = described;
    }
    auto& l = lines[idx];
    auto pos = l.find("\"" + names.front() + "\"");
    if (!target.empty() && pos != std::string::npos) {
      l.replace(pos, names.front().size() + 2, "\"" + target + "\"");
      changed = true;
    }
  } else if ((d.code == "sem.undefined_name" || contains(d.message, "is not defined")) && d.code != "sem.undefined_behavior" &&
             has_line && !names.empty()) {
    auto start = statement_start(lines, idx);
    lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(start),
                 "param " + names.front() + " = " + default_value(names.front()));
    changed = true;
  } else if (d.code == "sem.duplicate_name" && has_line && !names.empty()) {
    auto& l = lines[idx];
    if (d.message.rfind("object ", 0) == 0) {
      auto objects = object_names(lines);
      std::string fresh;
      for (int i = 2;; ++i) {
        fresh = names.front() + std::to_string(i);
        if (std::find(objects.begin(), objects.end(), fresh) == objects.end()) break;
      }
      auto eq = l.find('=');
      l = fresh + " " + l.substr(eq);
      changed = true;
    } else {
      changed = neutralise(lines, idx);
    }
  } else if (d.code == "sem.missing_ego" && rename_orphan_to_ego(lines)) {
    changed = true;
  } else if (d.code == "sem.missing_ego") {
    std::size_t at = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i)
      if (lines[i] == "#-- region: defaults") at = i + 1;
    if (at == lines.size())
      for (std::size_t i = 0; i < lines.size(); ++i)
        if (lines[i].rfind("model ", 0) == 0) at = i + 1;
    lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(std::min(at, lines.size())),
                 "ego = new Car on lane(0) with behavior FollowLaneBehavior(10)");
    changed = true;
  } else if (d.code == "sem.bad_distance" && has_line) {
    static const std::regex by(R"(\bby\s+-?[\w.]+)");
    lines[idx] = std::regex_replace(lines[idx], by, "by 20", std::regex_constants::format_first_only);
    changed = true;
  } else if (d.code == "exec.spawn_exhausted" && has_line) {
    changed = fix_spawn(lines, idx, d);
  } else if (d.code == "exec.off_road" && has_line) {
    static const std::regex lane(R"(lane\((\d+)\))");
    static const std::regex change(R"(lane_change\((left|right)\))");
    std::smatch m;
    if (contains(d.message, "has no lane") && std::regex_search(lines[idx], m, lane)) {
      lines[idx] = std::regex_replace(lines[idx], lane, "lane(0)", std::regex_constants::format_first_only);
      changed = true;
    } else if (std::regex_search(lines[idx], m, change) && m[1] == "right" && contains(d.message, "no lane to the right")) {
      lines[idx] = std::regex_replace(lines[idx], change, "lane_change(left)");
      changed = true;
    } else {
      changed = neutralise(lines, idx);
    }
  } else if (d.code == "exec.behavior_error" && has_line && contains(d.message, "offers no")) {
    changed = fix_turn(lines, idx, d);
  } else if (d.code == "exec.behavior_error" && has_line && contains(d.message, "has no signal")) {
    static const std::regex signal(R"(signal\(\d+\))");
    lines[idx] = std::regex_replace(lines[idx], signal, "signal(0)");
    changed = true;
  }
  if (!changed && has_line) changed = neutralise(lines, idx);
  return join(lines);
}

// ---------------------------------------------------------------- evaluation

struct Features {
  std::string adv_kind;
  std::string map;
  std::string weather;
  std::vector<std::string> actions;
  std::string adv_placement;
  int objects = 0;
  int requirements = 0;
};

Features features_of(const std::string& script) {
  Features f;
  static const std::regex map(R"(^param map\s*=\s*"(\w+)\")");
  static const std::regex weather(R"(^param weather\s*=\s*"([^"]*)\")");
  static const std::regex action(R"(do (\w+)\()");
  for (const auto& l : util::split_lines(script)) {
    std::smatch m;
    if (std::regex_search(l, m, map)) f.map = m[1];
    if (std::regex_search(l, m, weather)) f.weather = m[1];
    if (std::regex_search(l, m, action)) f.actions.push_back(m[1]);
    if (std::regex_match(l, m, kObjectDef)) {
      ++f.objects;
      if (m[1] == "adv") {
        f.adv_kind = util::to_lower(std::string(m[2]));
        f.adv_placement = m[3];
      }
    }
    if (l.rfind("require ", 0) == 0) ++f.requirements;
  }
  return f;
}


bool has_action(const Features& f, std::string_view a) {
  return std::find(f.actions.begin(), f.actions.end(), a) != f.actions.end();
}

}  // namespace

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string HeuristicProvider::extract(const std::string& category, const std::string& description) const {
  auto clauses = clauses_of(description);
  const auto& table = keyword_table();
  auto find = [&](std::string_view field) -> const FieldKeywords& {
    return *std::find_if(table.begin(), table.end(), [&](const FieldKeywords& k) { return k.field == field; });
  };
  auto behavior = best_clause(clauses, find("behavior"));
  auto geometry = best_clause(clauses, find("geometry"));
  auto spawn = best_clause(clauses, find("spawn"));
  auto requirements = best_clause(clauses, find("requirements"));
  std::vector<std::string> taken;
  for (const auto* c : {&behavior, &spawn})
    if (*c) taken.push_back(**c);
  auto others = best_clause(clauses, find("other_objects"), taken);
  auto weather = best_clause(clauses, find("weather"));

  std::optional<std::string> adversary;
  for (const auto* source : {&behavior, &spawn})
    if (!adversary && *source) adversary = agent_phrase(**source);
  if (!adversary) adversary = agent_phrase(util::to_lower(description));
  (void)category;

  auto line = [](std::string_view field, const std::optional<std::string>& v) {
    return std::string(field) + ": " + (v ? *v : "none") + "\n";
  };
  return line("behavior", behavior) + line("geometry", geometry) + line("spawn", spawn) +
         line("adversarial_object", adversary) + line("requirements", requirements) + line("other_objects", others) +
         line("weather", weather);
}

std::string HeuristicProvider::repair(const std::string& script, const std::string& diagnostics,
                                      const std::string& description) const {
  auto d = parse_first_diagnostic(diagnostics);
  if (!d) return script;
  return apply_fix(util::split_lines(script), *d, maps_, description);
}

std::string HeuristicProvider::evaluate(const std::string& description, const std::string& script) const {
  auto text = util::to_lower(description);
  auto f = features_of(script);
  std::array<int, 7> s{};
  std::array<std::string, 7> why;

  std::string want_kind = "car";
  if (any_of_words(text, {"pedestrian", "child", "walker"})) want_kind = "pedestrian";
  else if (any_of_words(text, {"cyclist", "bicycle"})) want_kind = "bicycle";
  else if (any_of_words(text, {"truck"})) want_kind = "truck";
  else if (any_of_words(text, {"cone", "debris", "obstacle such as"})) want_kind = "prop";
  s[0] = f.adv_kind == want_kind ? 10 : (f.adv_kind.empty() ? 0 : 5);
  why[0] = "adversary is " + (f.adv_kind.empty() ? std::string("missing") : f.adv_kind) + ", expected " + want_kind;

  std::vector<std::string_view> wanted;
  if (any_of_words(text, {"cut", "lane change", "changes lanes", "changing lanes", "merg", "overtake"})) wanted.push_back("lane_change");
  if (any_of_words(text, {"brake", "slows"})) wanted.push_back("brake");
  if (any_of_words(text, {"stalled", "stopped", "waits", "broken-down"})) wanted.push_back("wait");
  if (any_of_words(text, {"turns", "turn "})) wanted.push_back("turn");
  std::size_t hit = 0;
  for (auto w : wanted) hit += has_action(f, w) ? 1 : 0;
  s[1] = wanted.empty() ? (f.actions.empty() ? 6 : 9) : static_cast<int>(4 + (6 * hit) / wanted.size());
  why[1] = std::to_string(hit) + " of " + std::to_string(wanted.size()) + " described actions present";

  bool junction = any_of_words(text, {"intersection", "junction", "crossroads", "cross street", "turns", "turn "});
  bool map_junction = f.map == "four_way" || f.map == "t_junction";
  s[2] = junction == map_junction ? 10 : 3;
  why[2] = "map " + (f.map.empty() ? std::string("unset") : f.map);

  std::string want_weather;
  if (any_of_words(text, {"fog"})) want_weather = "fog";
  else if (any_of_words(text, {"rain", "wet", "storm"})) want_weather = "rain";
  else if (any_of_words(text, {"snow", "winter"})) want_weather = "snow";
  else if (any_of_words(text, {"night", "evening"})) want_weather = "night";
  else if (any_of_words(text, {"dusk", "low sun"})) want_weather = "dusk";
  if (want_weather.empty()) {
    s[3] = f.weather.empty() || f.weather == "clear" ? 10 : 6;
  } else {
    s[3] = contains(f.weather, want_weather) ? 10 : 2;
  }
  why[3] = "weather " + (f.weather.empty() ? std::string("unset") : f.weather);

  bool wants_others = any_of_words(text, {"parked", "traffic", "bus", "cones on", "neighbouring lane", "sidewalk", "slow truck"});
  bool has_others = f.objects > 2;
  s[4] = wants_others == has_others ? 10 : 6;
  why[4] = std::to_string(f.objects) + " objects";

  std::string want_place;
  if (any_of_words(text, {"behind", "from behind"})) want_place = "behind";
  else if (any_of_words(text, {"adjacent", "left lane", "next to"})) want_place = "left of";
  else if (any_of_words(text, {"ahead", "in front"})) want_place = "ahead of";
  if (want_place.empty()) {
    s[5] = f.adv_placement.empty() ? 5 : 9;
  } else {
    s[5] = contains(f.adv_placement, want_place) ? 10 : 5;
  }
  why[5] = "adversary placed " + (f.adv_placement.empty() ? std::string("nowhere") : std::string(util::trim(f.adv_placement.substr(0, f.adv_placement.find(" with")))));

  bool wants_req = any_of_words(text, {"must", "keep a minimum", "within"});
  s[6] = wants_req == (f.requirements > 0) ? 10 : 7;
  why[6] = std::to_string(f.requirements) + " requirements";

  eval::CriteriaScores scores;
  scores.scores = s;
  scores.rationale = why;
  return eval::render_scores(scores);
}

llm::ChatResponse HeuristicProvider::complete(const llm::ChatRequest& request) {
  llm::ChatResponse r;
  r.provider = name();
  auto user = last_user(request);
  switch (request.tag) {
    case llm::Tag::extract: {
      std::string turn = user;
      // A format-reminder retry repeats the question two turns earlier.
      if (!contains(turn, pipeline::kDescriptionMarker) && request.messages.size() >= 3)
        turn = request.messages[request.messages.size() - 3].content;
      auto category = section(turn, pipeline::kCategoryMarker, false);
      auto desc_at = turn.find(pipeline::kDescriptionMarker);
      auto description = desc_at == std::string::npos ? turn : turn.substr(desc_at + pipeline::kDescriptionMarker.size());
      r.content = extract(category.substr(0, category.find('\n')), description);
      break;
    }
    case llm::Tag::snippet: {
      std::string first;
      for (const auto& m : request.messages)
        if (m.role == llm::Role::user && contains(m.content, pipeline::kExemplarMarker)) {
          first = m.content;
          break;
        }
      auto at = first.find(std::string(pipeline::kExemplarMarker) + "1");
      auto snippet = at == std::string::npos ? std::string() : util::strip_code_fence(first.substr(at));
      r.content = fence(snippet);
      break;
    }
    case llm::Tag::repair: {
      auto script = section(user, repair::kScriptHeading, true);
      auto diag_at = user.find(repair::kDiagnosticsHeading);
      auto diagnostics = diag_at == std::string::npos ? std::string() : user.substr(diag_at + repair::kDiagnosticsHeading.size() + 1);
      auto description = section(user, repair::kDescriptionHeading, false);
      r.content = "Here is the corrected script:\n\n" + fence(repair(script, diagnostics, description));
      break;
    }
    case llm::Tag::evaluate: {
      auto description = section(user, eval::kEvalDescriptionHeading, false);
      auto script = section(user, eval::kEvalScriptHeading, true);
      r.content = evaluate(description, script);
      break;
    }
  }
  return r;
}

}  // namespace arise::offline
