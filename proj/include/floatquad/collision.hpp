#pragma once

#include <optional>
#include <string>

#include "floatquad/dynamics.hpp"
#include "floatquad/model.hpp"

namespace floatquad {

struct CollisionReport {
  int leg_a = -1;
  int leg_b = -1;
  bool sphere_sphere = false;  // otherwise sphere vs leg segment
  double penetration = 0.0;

  std::string describe() const {
    std::string kind = sphere_sphere ? "foot-foot" : "foot-segment";
    return kind + " legs " + std::to_string(leg_a) + "/" + std::to_string(leg_b) +
           " penetration " + std::to_string(penetration);
  }
};

/// Distance from point p to segment [a, b].
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

/// Self-collision check with virtual spheres around each foot. Spheres
/// collide with leg segments and with each other, never with the base or the
/// ground. Left legs (0,1) and right legs (2,3) are laterally separated on
/// the physical robot, so only same-side pairs are tested. A sphere is never
/// tested against its own lower link (it is centered on that link's tip).
/// Returns the first violating pair in a fixed scan order.
inline std::optional<CollisionReport> detect_self_collision(const BodyKinematics& bk,
                                                            double sphere_radius) {
  for (int side = 0; side < 2; ++side) {
    const int la = side == 0 ? kLeftLegs[0] : kRightLegs[0];
    const int lb = side == 0 ? kLeftLegs[1] : kRightLegs[1];
    const auto& A = bk.leg[la];
    const auto& B = bk.leg[lb];

    // Foot sphere vs foot sphere.
    {
      const double d = (A.foot - B.foot).norm();
      if (d < 2.0 * sphere_radius)
        return CollisionReport{la, lb, true, 2.0 * sphere_radius - d};
    }
    // Each foot sphere vs the segments it may touch: the other leg's upper
    // and lower links, and its own upper link.
    const struct {
      int sphere_leg, seg_leg;
      Vec2 s0, s1;
    } pairs[] = {
        {la, lb, B.hip, B.elbow},  {la, lb, B.elbow, B.foot}, {la, la, A.hip, A.elbow},
        {lb, la, A.hip, A.elbow},  {lb, la, A.elbow, A.foot}, {lb, lb, B.hip, B.elbow},
    };
    for (const auto& pr : pairs) {
      const Vec2& c = pr.sphere_leg == la ? A.foot : B.foot;
      const double d = point_segment_distance(c, pr.s0, pr.s1);
      if (d < sphere_radius)
        return CollisionReport{pr.sphere_leg, pr.seg_leg, false, sphere_radius - d};
    }
  }
  return std::nullopt;
}

}  // namespace floatquad
