#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arise/exec/geometry.hpp"

namespace arise::exec {

struct Lane {
  int id = 0;
  Polyline centerline;
  double width = 3.5;
  std::vector<int> successors;
};

enum class SignalKind { traffic_light, stop_sign };

struct Signal {
  Vec2 position;
  SignalKind kind = SignalKind::traffic_light;
};

enum class SignalColor { green, yellow, red };
std::string_view to_string(SignalColor c);

/// Immutable road graph; shareable across concurrent runs.
struct RoadNetwork {
  std::string name;
  std::vector<Lane> lanes;
  std::vector<std::vector<int>> junctions;
  std::vector<Signal> signals;

  const Lane* find_lane(int id) const;

  /// Lane whose strip contains `p` (|lateral| <= width/2 + margin) with the
  /// smallest lateral offset, optionally restricted to lanes whose heading is
  /// within 90 degrees of `heading`.
  struct LaneHit {
    const Lane* lane = nullptr;
    Polyline::Projection projection;
  };
  std::optional<LaneHit> locate(Vec2 p, double margin = 0.0,
                                std::optional<double> heading = std::nullopt) const;

  /// Traffic lights cycle green 12 s, yellow 3 s, red 15 s; stop signs read red.
  SignalColor signal_state(std::size_t index, double time_s) const;
};

/// Parses the `arise-map/1` JSON schema. Throws `map.parse_error` or
/// `map.dangling_successor`.
RoadNetwork parse_map(std::string_view json_text);
RoadNetwork load_map(const std::string& path);

}  // namespace arise::exec
