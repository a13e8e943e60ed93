#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace arise::exec {

struct Vec2 {
  double x = 0;
  double y = 0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double k) { return {a.x * k, a.y * k}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 unit_from_heading(double radians) { return {std::cos(radians), std::sin(radians)}; }
/// Left-hand normal of a direction.
inline Vec2 left_normal(Vec2 d) { return {-d.y, d.x}; }

/// Wraps an angle to (-pi, pi].
double wrap_angle(double radians);

inline constexpr double kPi = 3.14159265358979323846;
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Polyline with cumulative arc length, parameterised by distance `s`.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  Vec2 point_at(double s) const;
  /// Heading in radians of the segment containing `s`.
  double heading_at(double s) const;

  struct Projection {
    double s = 0;        // arc length of the closest point
    double lateral = 0;  // signed, positive to the left
    double distance = 0; // unsigned distance to the closest point
    bool within = false; // closest point is interior (not clamped past an end)
  };
  Projection project(Vec2 p) const;

 private:
  std::size_t segment_index(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

/// Oriented rectangle given by centre, heading and full length/width.
struct OrientedBox {
  Vec2 center;
  double heading = 0;
  double length = 0;
  double width = 0;

  std::array<Vec2, 4> corners() const;
};

/// Separating-axis test; touching boxes count as overlapping.
bool overlaps(const OrientedBox& a, const OrientedBox& b);

}  // namespace arise::exec
