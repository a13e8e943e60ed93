#include "arise/exec/geometry.hpp"

#include <algorithm>
#include <limits>

namespace arise::exec {

double wrap_angle(double a) {
  while (a > kPi) a -= 2 * kPi;
  while (a <= -kPi) a += 2 * kPi;
  return a;
}

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points)) {
  cumulative_.reserve(points_.size());
  double acc = 0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i) acc += norm(points_[i] - points_[i - 1]);
    cumulative_.push_back(acc);
  }
}

std::size_t Polyline::segment_index(double s) const {
  if (points_.size() < 2) return 0;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  auto idx = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  idx = idx == 0 ? 0 : idx - 1;
  return std::min(idx, points_.size() - 2);
}

Vec2 Polyline::point_at(double s) const {
  if (points_.empty()) return {};
  if (points_.size() == 1) return points_[0];
  s = std::clamp(s, 0.0, length());
  auto i = segment_index(s);
  double seg = cumulative_[i + 1] - cumulative_[i];
  double t = seg > 0 ? (s - cumulative_[i]) / seg : 0.0;
  return points_[i] + (points_[i + 1] - points_[i]) * t;
}

double Polyline::heading_at(double s) const {
  if (points_.size() < 2) return 0;
  auto i = segment_index(std::clamp(s, 0.0, length()));
  Vec2 d = points_[i + 1] - points_[i];
  return std::atan2(d.y, d.x);
}

Polyline::Projection Polyline::project(Vec2 p) const {
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    Vec2 a = points_[i];
    Vec2 d = points_[i + 1] - a;
    double len2 = dot(d, d);
    double t = len2 > 0 ? dot(p - a, d) / len2 : 0.0;
    bool interior = true;
    if (t < 0) {
      interior = i != 0 ? true : t > -1e-9;
      t = 0;
    } else if (t > 1) {
      interior = i + 2 != points_.size() ? true : t < 1 + 1e-9;
      t = 1;
    }
    Vec2 q = a + d * t;
    double dist = norm(p - q);
    if (dist < best.distance) {
      double seg_len = std::sqrt(len2);
      best.distance = dist;
      best.s = cumulative_[i] + t * seg_len;
      best.lateral = seg_len > 0 ? cross(d * (1.0 / seg_len), p - q) : 0.0;
      best.within = interior;
    }
  }
  return best;
}

std::array<Vec2, 4> OrientedBox::corners() const {
  Vec2 f = unit_from_heading(heading) * (length / 2);
  Vec2 l = left_normal(unit_from_heading(heading)) * (width / 2);
  return {center + f + l, center + f - l, center - f - l, center - f + l};
}

bool overlaps(const OrientedBox& a, const OrientedBox& b) {
  auto ca = a.corners();
  auto cb = b.corners();
  Vec2 axes[4] = {unit_from_heading(a.heading), left_normal(unit_from_heading(a.heading)),
                  unit_from_heading(b.heading), left_normal(unit_from_heading(b.heading))};
  for (const auto& axis : axes) {
    double amin = std::numeric_limits<double>::infinity(), amax = -amin;
    double bmin = amin, bmax = -amin;
    for (const auto& c : ca) {
      double v = dot(c, axis);
      amin = std::min(amin, v);
      amax = std::max(amax, v);
    }
    for (const auto& c : cb) {
      double v = dot(c, axis);
      bmin = std::min(bmin, v);
      bmax = std::max(bmax, v);
    }
    if (amax < bmin || bmax < amin) return false;
  }
  return true;
}

}  // namespace arise::exec
