#pragma once

#include "floatquad/math.hpp"
#include "floatquad/model.hpp"
#include "floatquad/rewards.hpp"

namespace floatquad {

/// Index map of the flat observation vector. Entry order:
/// joint angles, joint rates, pitch, [pitch rate], and for the jumping task
/// base height, base velocity (x, z), target velocity (x, z).
/// The symmetric variant sees the left-side legs only.
struct ObsLayout {
  int n_leg_joints = kNumJoints;
  int idx_q = 0;
  int idx_qd = 0;
  int idx_pitch = 0;
  int idx_pitch_rate = -1;
  int idx_bz = -1;
  int idx_vx = -1;
  int idx_vz = -1;
  int idx_tvx = -1;
  int idx_tvz = -1;
  int dim = 0;

  static ObsLayout make(Task task, Variant variant, bool include_pitch_rate) {
    ObsLayout l;
    l.n_leg_joints = variant == Variant::symmetric ? kNumJoints / 2 : kNumJoints;
    l.idx_q = 0;
    l.idx_qd = l.n_leg_joints;
    l.idx_pitch = 2 * l.n_leg_joints;
    int next = l.idx_pitch + 1;
    if (include_pitch_rate) l.idx_pitch_rate = next++;
    if (task == Task::jump2d) {
      l.idx_bz = next++;
      l.idx_vx = next++;
      l.idx_vz = next++;
      l.idx_tvx = next++;
      l.idx_tvz = next++;
    }
    l.dim = next;
    return l;
  }
};

struct Observation {
  VecX values;
  ObsLayout layout;
};

/// Box limits applied to every emitted observation entry.
struct ObsClipBox {
  double angle = 4.0 * kPi;
  double rate = 50.0;
  double height = 10.0;
  double velocity = 10.0;
};

inline void clip_observation(Observation& obs, const ObsClipBox& box) {
  const auto& l = obs.layout;
  auto clip_at = [&](int idx, double lim) {
    if (idx >= 0) obs.values(idx) = clamp(obs.values(idx), -lim, lim);
  };
  for (int i = 0; i < l.n_leg_joints; ++i) {
    clip_at(l.idx_q + i, box.angle);
    clip_at(l.idx_qd + i, box.rate);
  }
  clip_at(l.idx_pitch, box.angle);
  clip_at(l.idx_pitch_rate, box.rate);
  clip_at(l.idx_bz, box.height);
  clip_at(l.idx_vx, box.velocity);
  clip_at(l.idx_vz, box.velocity);
  clip_at(l.idx_tvx, box.velocity);
  clip_at(l.idx_tvz, box.velocity);
}

/// Observation mirroring for the jumping task: when the robot flies upward
/// above the trigger height (v_z > 0 and b_z > 0.7 m), the approached wall is
/// presented as the ground: (v_x, v_z, v*_x) are negated, height becomes
/// d_w - b_z, and the pitch is shifted by pi/2 (then wrapped). Identity
/// otherwise.
inline Observation mirror_observation(const Observation& obs, double d_w) {
  Observation out = obs;
  const auto& l = obs.layout;
  if (l.idx_vz < 0 || l.idx_bz < 0) return out;
  const double vz = obs.values(l.idx_vz);
  const double bz = obs.values(l.idx_bz);
  if (!(vz > 0.0 && bz > 0.7)) return out;
  out.values(l.idx_vx) = -obs.values(l.idx_vx);
  out.values(l.idx_vz) = -vz;
  out.values(l.idx_tvx) = -obs.values(l.idx_tvx);
  out.values(l.idx_bz) = d_w - bz;
  out.values(l.idx_pitch) = wrap_angle(kPi / 2.0 + obs.values(l.idx_pitch));
  return out;
}

}  // namespace floatquad
