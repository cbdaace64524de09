#pragma once

#include <array>
#include <stdexcept>

#include "floatquad/math.hpp"

namespace floatquad {

/// One rigid link of a leg (or the base). Planar: scalar inertia about the
/// center of mass. An optional point mass rigidly attached at the link tip
/// models the heavy foot.
struct LinkParams {
  double mass = 0.0;                // kg
  double inertia_about_com = 0.0;   // kg m^2
  Vec2 com_offset = Vec2::Zero();   // m, in link frame (x along link)
  double length = 0.0;              // m
  double attached_point_mass = 0.0; // kg, at link tip (feet only)

  void validate() const {
    if (!(mass > 0.0)) throw std::invalid_argument("LinkParams: mass must be > 0");
    if (!(inertia_about_com > 0.0)) throw std::invalid_argument("LinkParams: inertia must be > 0");
    if (!(length > 0.0)) throw std::invalid_argument("LinkParams: length must be > 0");
    if (attached_point_mass < 0.0) throw std::invalid_argument("LinkParams: point mass must be >= 0");
  }
};

/// Velocity-dependent admissible torque region of one actuator.
struct ActuatorModel {
  double tau_h = 25.0;      // N m, peak torque
  double qdot_safe = 10.0;  // rad/s, no accelerating torque beyond this speed
  double qdot_h = 25.0;     // rad/s, zero-torque speed of the affine envelope

  void validate() const {
    if (!(tau_h > 0.0)) throw std::invalid_argument("ActuatorModel: tau_h must be > 0");
    if (!(0.0 < qdot_safe && qdot_safe < qdot_h))
      throw std::invalid_argument("ActuatorModel: need 0 < qdot_safe < qdot_h");
  }
};

struct PDGains {
  double kp = 20.0;  // N m / rad
  double kd = 1.0;   // N m s / rad

  void validate() const {
    if (!(kp > 0.0)) throw std::invalid_argument("PDGains: kp must be > 0");
    if (kd < 0.0) throw std::invalid_argument("PDGains: kd must be >= 0");
  }
};

struct JointLimits {
  double shoulder_lo = -2.4;
  double shoulder_hi = 2.4;
  double elbow_lo = 0.1;
  double elbow_hi = 2.8;
};

enum class CollisionClass { foot_virtual, foot_contact };

/// Sphere attached to a link, used for self-collision margins (virtual) and
/// ground/wall contact (contact).
struct SphereGeom {
  int parent_leg = 0;              // leg index 0..3, sphere sits at the foot point
  Vec2 local_offset = Vec2::Zero();
  double radius = 0.06;
  CollisionClass collision_class = CollisionClass::foot_virtual;
};

/// Penalty contact parameters (spring-damper normal + regularized Coulomb).
struct ContactParams {
  double normal_stiffness = 1.0e4;                  // N/m
  double normal_damping = 200.0;                    // N s/m
  double friction_coeff = 0.8;
  double tangential_regularization_velocity = 0.01; // m/s

  void validate() const {
    if (!(normal_stiffness > 0.0)) throw std::invalid_argument("ContactParams: stiffness must be > 0");
    if (normal_damping < 0.0) throw std::invalid_argument("ContactParams: damping must be >= 0");
    if (friction_coeff < 0.0) throw std::invalid_argument("ContactParams: friction must be >= 0");
    if (!(tangential_regularization_velocity > 0.0))
      throw std::invalid_argument("ContactParams: regularization velocity must be > 0");
  }
};

inline constexpr int kNumLegs = 4;
inline constexpr int kNumJoints = 2 * kNumLegs;
inline constexpr int kBaseDof = 3;
inline constexpr int kDof = kBaseDof + kNumJoints;  // x, z, pitch, 8 joints

using JointVec = Eigen::Matrix<double, kNumJoints, 1>;

/// Leg order: 0 = left front, 1 = left hind, 2 = right front, 3 = right hind.
/// Left legs (0, 1) and right legs (2, 3) live in laterally separated planes,
/// so collision checks only pair legs on the same side.
inline constexpr int kLeftLegs[2] = {0, 1};
inline constexpr int kRightLegs[2] = {2, 3};
inline int leg_side(int leg) { return leg < 2 ? 0 : 1; }

/// Full parameter set of the planar quadruped: a floating base with four
/// 2-link serial legs in the sagittal plane.
struct RobotModel {
  LinkParams base{20.3, 0.5286, Vec2::Zero(), 0.50, 0.0};
  LinkParams upper{0.3, 0.0015625, Vec2(0.125, 0.0), 0.25, 0.0};
  LinkParams lower{0.15, 0.00078125, Vec2(0.125, 0.0), 0.25, 0.33};
  std::array<Vec2, kNumLegs> hip_offsets = {
      Vec2(0.25, 0.0), Vec2(-0.25, 0.0), Vec2(0.25, 0.0), Vec2(-0.25, 0.0)};
  Vec2 gravity = Vec2::Zero();
  /// Leg reference direction in the base frame; joint angle 0 points the
  /// upper link along it (straight down).
  double leg_reference_angle = -kPi / 2.0;
  Vec2 nominal_foot_offset = Vec2(0.0, -0.35);  // hip frame

  ActuatorModel actuator;
  PDGains gains;
  JointLimits limits;
  double virtual_sphere_radius = 0.06;
  double contact_sphere_radius = 0.03;

  double total_mass() const {
    return base.mass + kNumLegs * (upper.mass + lower.mass + lower.attached_point_mass);
  }

  void validate() const {
    base.validate();
    upper.validate();
    lower.validate();
    actuator.validate();
    gains.validate();
    if (!(virtual_sphere_radius > 0.0) || !(contact_sphere_radius > 0.0))
      throw std::invalid_argument("RobotModel: sphere radii must be > 0");
  }
};

}  // namespace floatquad
