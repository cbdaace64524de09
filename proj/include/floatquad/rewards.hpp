#pragma once

#include "floatquad/math.hpp"

namespace floatquad {

enum class Task { orient2d, jump2d };
enum class Variant { symmetric, asymmetric };

/// Curriculum parameter eta scales the initial-state ranges, ramping linearly
/// from eta_start to eta_end over ramp_fraction of total training progress.
struct CurriculumSchedule {
  double eta_start = 0.5;
  double eta_end = 1.0;
  double ramp_fraction = 0.6;

  double eta(double progress) const {
    if (ramp_fraction <= 0.0) return eta_end;
    const double f = clamp(progress / ramp_fraction, 0.0, 1.0);
    return eta_start + (eta_end - eta_start) * f;
  }
};

/// Reward weights c0..c6. c5/c6 are only active for the jumping task, which
/// also overrides c2.
struct RewardWeights {
  double c0 = 1.0 / 200.0;
  double c1 = 1.0;
  double c2 = 1.0 / 100.0;
  double c3 = 1.0 / 3.0;
  double c4 = 1.0 / 3.0;
  double c5 = 1.0;
  double c6 = 1.0 / 30.0;

  static RewardWeights defaults_for(Task t) {
    RewardWeights w;
    if (t == Task::jump2d) w.c2 = 1.0 / 20.0;
    return w;
  }
};

/// Unweighted reward terms.
struct RewardTerms {
  double orient = 0.0;       // -|pitch error|
  double base_acc = 0.0;     // -||vdot_b||^2
  double action_clip = 0.0;  // -||q* - q_clipped||^2
  double torque_clip = 0.0;  // -||tau* - tau_clipped||^2
  double jump = 0.0;         // exp(-||v* - v||^2 / 0.2^2)
  double torque = 0.0;       // -||tau*||^2
};

/// Orientation penalty; expects the pitch error already wrapped to (-pi, pi].
inline double reward_orient2d(double phi) { return -std::abs(phi); }

/// Velocity-tracking kernel in (0, 1].
inline double reward_jump(const Vec2& v_target, const Vec2& v) {
  return std::exp(-(v_target - v).squaredNorm() / 0.04);
}

/// Quadratic auxiliary penalties.
inline RewardTerms reward_aux(const Vec2& base_accel, double action_residual_sq,
                              double torque_residual_sq, double torques_sq) {
  RewardTerms t;
  t.base_acc = -base_accel.squaredNorm();
  t.action_clip = -action_residual_sq;
  t.torque_clip = -torque_residual_sq;
  t.torque = -torques_sq;
  return t;
}

/// Weighted combination; the jump and torque terms participate only in the
/// jumping task.
inline double combine_rewards(const RewardTerms& t, const RewardWeights& w, Task task) {
  double inner = w.c1 * t.orient + w.c2 * t.base_acc + w.c3 * t.action_clip + w.c4 * t.torque_clip;
  if (task == Task::jump2d) inner += w.c5 * t.jump + w.c6 * t.torque;
  return w.c0 * inner;
}

/// Pitch error seen by the policy: wrap(phi_b - phi_target).
inline double apply_target_offset(double phi_b, double phi_target) {
  return wrap_angle(phi_b - phi_target);
}

/// Commanded horizontal velocity pointing at the center of the opposite wall.
inline double wall_center_target(double b_x, double d_w, double v_star_z) {
  return -(b_x / d_w) * v_star_z;
}

}  // namespace floatquad
