#include "arise/exec/road_network.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "arise/error.hpp"
#include "arise/util/text.hpp"

namespace arise::exec {

using nlohmann::json;

std::string_view to_string(SignalColor c) {
  switch (c) {
    case SignalColor::green: return "green";
    case SignalColor::yellow: return "yellow";
    case SignalColor::red: return "red";
  }
  return "?";
}

const Lane* RoadNetwork::find_lane(int id) const {
  for (const auto& l : lanes)
    if (l.id == id) return &l;
  return nullptr;
}

std::optional<RoadNetwork::LaneHit> RoadNetwork::locate(Vec2 p, double margin,
                                                       std::optional<double> heading) const {
  std::optional<LaneHit> best;
  for (const auto& lane : lanes) {
    auto proj = lane.centerline.project(p);
    if (!proj.within || std::fabs(proj.lateral) > lane.width / 2 + margin) continue;
    if (heading) {
      double diff = wrap_angle(lane.centerline.heading_at(proj.s) - *heading);
      if (std::fabs(diff) >= kPi / 2) continue;
    }
    if (!best || std::fabs(proj.lateral) < std::fabs(best->projection.lateral))
      best = LaneHit{&lane, proj};
  }
  return best;
}

SignalColor RoadNetwork::signal_state(std::size_t index, double time_s) const {
  if (index >= signals.size() || signals[index].kind == SignalKind::stop_sign) return SignalColor::red;
  double phase = std::fmod(time_s, 30.0);
  if (phase < 12.0) return SignalColor::green;
  if (phase < 15.0) return SignalColor::yellow;
  return SignalColor::red;
}

namespace {

Vec2 point_of(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error("map.parse_error", "point must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

RoadNetwork parse_map(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error("map.parse_error", e.what());
  }
  RoadNetwork net;
  try {
    if (doc.value("schema", "") != "arise-map/1")
      throw Error("map.parse_error", "expected schema 'arise-map/1'");
    net.name = doc.at("name").get<std::string>();
    std::set<int> ids;
    for (const auto& jl : doc.at("lanes")) {
      Lane lane;
      lane.id = jl.at("id").get<int>();
      std::vector<Vec2> pts;
      for (const auto& jp : jl.at("centerline")) pts.push_back(point_of(jp));
      if (pts.size() < 2)
        throw Error("map.parse_error", "lane " + std::to_string(lane.id) + " centerline needs at least 2 points");
      lane.centerline = Polyline(std::move(pts));
      if (!(lane.centerline.length() > 0))
        throw Error("map.parse_error", "lane " + std::to_string(lane.id) + " has zero length");
      lane.width = jl.at("width").get<double>();
      if (!(lane.width > 0))
        throw Error("map.parse_error", "lane " + std::to_string(lane.id) + " width must be positive");
      lane.successors = jl.value("successors", std::vector<int>{});
      if (!ids.insert(lane.id).second)
        throw Error("map.parse_error", "duplicate lane id " + std::to_string(lane.id));
      net.lanes.push_back(std::move(lane));
    }
    for (const auto& jj : doc.value("junctions", json::array())) {
      auto members = jj.get<std::vector<int>>();
      for (int id : members)
        if (!ids.count(id))
          throw Error("map.parse_error", "junction references missing lane " + std::to_string(id));
      net.junctions.push_back(std::move(members));
    }
    for (const auto& js : doc.value("signals", json::array())) {
      Signal s;
      s.position = point_of(js.at("position"));
      auto kind = js.at("kind").get<std::string>();
      if (kind == "traffic_light") s.kind = SignalKind::traffic_light;
      else if (kind == "stop_sign") s.kind = SignalKind::stop_sign;
      else throw Error("map.parse_error", "unknown signal kind '" + kind + "'");
      net.signals.push_back(s);
    }
    for (const auto& lane : net.lanes)
      for (int succ : lane.successors)
        if (!ids.count(succ))
          throw Error("map.dangling_successor", "lane " + std::to_string(lane.id) +
                                                    " has successor " + std::to_string(succ) +
                                                    " which does not exist");
  } catch (const json::exception& e) {
    throw Error("map.parse_error", e.what());
  }
  return net;
}

RoadNetwork load_map(const std::string& path) {
  std::string text;
  try {
    text = util::read_file(path);
  } catch (const Error& e) {
    throw Error("map.parse_error", e.what());
  }
  return parse_map(text);
}

}  // namespace arise::exec
