#pragma once

#include <cmath>

namespace polelm {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline bool finite(const Point2& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

// Wraps an angle into (-pi, pi].
inline double normalize_angle(double theta) {
  const double two_pi = 2.0 * M_PI;
  double a = std::fmod(theta + M_PI, two_pi);
  if (a <= 0.0) a += two_pi;
  return a - M_PI;
}

// SE(2) rigid transform: p -> R(theta) * p + (tx, ty).
struct Pose2 {
  double tx = 0.0;
  double ty = 0.0;
  double theta = 0.0;  // radians, normalized to (-pi, pi]

  static Pose2 identity() { return Pose2{}; }
};

inline Pose2 make_pose(double tx, double ty, double theta) {
  return Pose2{tx, ty, normalize_angle(theta)};
}

inline Point2 apply(const Pose2& pose, const Point2& p) {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  return Point2{c * p.x - s * p.y + pose.tx, s * p.x + c * p.y + pose.ty};
}

inline Pose2 compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return Pose2{c * b.tx - s * b.ty + a.tx,
               s * b.tx + c * b.ty + a.ty,
               normalize_angle(a.theta + b.theta)};
}

inline Pose2 inverse(const Pose2& a) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return Pose2{-(c * a.tx + s * a.ty), -(-s * a.tx + c * a.ty),
               normalize_angle(-a.theta)};
}

}  // namespace polelm
