#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace floatquad {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

/// Unit vector at angle theta.
inline Vec2 unit_vec(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// 90-degree counterclockwise rotation of v (the planar "cross with z-hat").
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

/// Planar cross product a x b (scalar z component).
inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double clamp(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

inline double square(double x) { return x * x; }

}  // namespace floatquad
