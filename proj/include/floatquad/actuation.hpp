#pragma once

#include "floatquad/math.hpp"
#include "floatquad/model.hpp"

namespace floatquad {

/// Joint-space PD law: tau* = kp (q* - q) - kd qdot.
inline JointVec pd_torques(const JointVec& q_star, const JointVec& q, const JointVec& qdot,
                           const PDGains& g) {
  return g.kp * (q_star - q) - g.kd * qdot;
}

struct TorqueClipResult {
  double tau = 0.0;
  double clip_residual = 0.0;  // tau* - tau, feeds the torque-clip penalty
};

/// Velocity-dependent torque limit. Accelerating torque is cut to zero at
/// speeds beyond qdot_safe; below that the affine DC-motor line (zero at
/// qdot_h) applies, clamped to [0, tau_h]. Braking torque follows the
/// mirrored construction and is therefore never zeroed by the speed rule.
inline double max_accel_torque(double qdot, const ActuatorModel& a) {
  if (qdot >= a.qdot_safe) return 0.0;
  const double line = a.tau_h * (a.qdot_h - qdot) / (a.qdot_h - a.qdot_safe);
  return clamp(line, 0.0, a.tau_h);
}

inline TorqueClipResult clip_actuator_torque(double tau_star, double qdot,
                                             const ActuatorModel& a) {
  const double tau_max = max_accel_torque(qdot, a);
  const double tau_min = -max_accel_torque(-qdot, a);
  const double tau = clamp(tau_star, tau_min, tau_max);
  return {tau, tau_star - tau};
}

struct TargetClipResult {
  JointVec q_clipped;
  double clip_residual_sq = 0.0;  // ||q* - q_clipped||^2, feeds the action-clip penalty
};

/// Clamp desired joint positions to the feasible box of the leg linkage.
inline TargetClipResult clip_joint_targets(const JointVec& q_star, const JointLimits& lim) {
  TargetClipResult r;
  r.q_clipped = q_star;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const int sh = 2 * leg;
    const int el = 2 * leg + 1;
    r.q_clipped(sh) = clamp(q_star(sh), lim.shoulder_lo, lim.shoulder_hi);
    r.q_clipped(el) = clamp(q_star(el), lim.elbow_lo, lim.elbow_hi);
  }
  r.clip_residual_sq = (q_star - r.q_clipped).squaredNorm();
  return r;
}

/// Constant-magnitude torque opposing joint motion, zero inside a small
/// velocity deadband. Models the randomized intrinsic actuator friction.
inline double static_friction_torque(double qdot, double magnitude, double deadband = 0.01) {
  if (qdot > deadband) return -magnitude;
  if (qdot < -deadband) return magnitude;
  return 0.0;
}

}  // namespace floatquad
