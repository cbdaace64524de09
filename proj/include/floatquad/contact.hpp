#pragma once

#include <vector>

#include "floatquad/dynamics.hpp"
#include "floatquad/model.hpp"

namespace floatquad {

/// Static half-plane obstacle; points with n.(p - p0) > 0 are free space.
struct HalfPlane {
  Vec2 point = Vec2::Zero();
  Vec2 normal = Vec2(0.0, 1.0);  // unit, outward
};

struct ContactForce {
  int leg = -1;
  Vec2 point = Vec2::Zero();  // sphere center (application point)
  Vec2 force = Vec2::Zero();
  double normal_force = 0.0;
  double penetration = 0.0;
};

/// Penalty force of one sphere against one half-plane. Normal part is
/// max(0, k_n * penetration - d_n * separation_rate) along the surface
/// normal; tangential part is regularized Coulomb friction saturating at
/// mu * N. Zero when separated.
inline ContactForce sphere_halfplane_force(const Vec2& center, const Vec2& center_vel,
                                           double radius, const HalfPlane& hp,
                                           const ContactParams& p) {
  ContactForce out;
  out.point = center;
  const double dist = hp.normal.dot(center - hp.point);
  const double penetration = radius - dist;
  if (penetration <= 0.0) return out;
  const double separation_rate = hp.normal.dot(center_vel);
  const double n_force = std::max(0.0, p.normal_stiffness * penetration -
                                           p.normal_damping * separation_rate);
  const Vec2 tangent = perp(hp.normal);
  const double vt = tangent.dot(center_vel);
  const double t_force =
      -p.friction_coeff * n_force *
      clamp(vt / p.tangential_regularization_velocity, -1.0, 1.0);
  out.force = n_force * hp.normal + t_force * tangent;
  out.normal_force = n_force;
  out.penetration = penetration;
  return out;
}

/// Forces of all foot contact spheres against a set of half-planes.
/// Forces are applied at the sphere centers (the foot points).
template <typename Sink>
inline void foot_contact_forces(const BodyKinematics& bk, double sphere_radius,
                                const std::vector<HalfPlane>& surfaces, const ContactParams& p,
                                Sink&& sink) {
  for (int k = 0; k < kNumLegs; ++k) {
    const auto& L = bk.leg[k];
    for (const auto& hp : surfaces) {
      ContactForce f = sphere_halfplane_force(L.foot, L.foot_vel, sphere_radius, hp, p);
      if (f.normal_force > 0.0) {
        f.leg = k;
        sink(f);
      }
    }
  }
}

}  // namespace floatquad
