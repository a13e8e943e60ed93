#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

// Mechanical, line-preserving fault injection over passing scripts.
namespace faults {

enum class Fault { undefined_behavior, undefined_object, unknown_map, duplicate_name, missing_ego };

inline constexpr std::array<Fault, 5> kAll = {Fault::undefined_behavior, Fault::undefined_object, Fault::unknown_map,
                                              Fault::duplicate_name, Fault::missing_ego};

inline std::string_view expected_code(Fault f) {
  switch (f) {
    case Fault::undefined_behavior: return "sem.undefined_behavior";
    case Fault::undefined_object: return "sem.undefined_object";
    case Fault::unknown_map: return "sem.unknown_map";
    case Fault::duplicate_name: return "sem.duplicate_name";
    case Fault::missing_ego: return "sem.missing_ego";
  }
  return "";
}

inline std::string replace_first(std::string s, std::string_view from, std::string_view to) {
  auto pos = s.find(from);
  if (pos == std::string::npos) throw std::runtime_error("fault site '" + std::string(from) + "' not found");
  s.replace(pos, from.size(), to);
  return s;
}

inline std::string inject(const std::string& source, Fault f) {
  switch (f) {
    case Fault::undefined_behavior: {
      auto pos = source.find("adv = new");
      auto at = source.find("with behavior ", pos);
      if (pos == std::string::npos || at == std::string::npos) throw std::runtime_error("no adversary behavior");
      auto name_start = at + 14;
      auto name_end = source.find('(', name_start);
      std::string out = source;
      out.replace(name_start, name_end - name_start, "FollowGhost");
      return out;
    }
    case Fault::undefined_object: {
      auto pos = source.find("require ");
      if (pos == std::string::npos) throw std::runtime_error("no requirement");
      auto dot = source.find('.', pos);
      std::string out = source;
      out.replace(pos + 8, dot - (pos + 8), "ghost");
      return out;
    }
    case Fault::unknown_map: {
      auto pos = source.find("param map = \"");
      if (pos == std::string::npos) throw std::runtime_error("no map");
      auto end = source.find('"', pos + 13);
      std::string out = source;
      out.replace(pos + 13, end - (pos + 13), "atlantis");
      return out;
    }
    case Fault::duplicate_name: return replace_first(source, "adv = new", "ego = new");
    case Fault::missing_ego: return replace_first(source, "ego = new", "hero = new");
  }
  return source;
}

}  // namespace faults
