#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "floatquad/actuation.hpp"
#include "floatquad/collision.hpp"
#include "floatquad/contact.hpp"
#include "floatquad/dynamics.hpp"
#include "floatquad/integrators.hpp"
#include "floatquad/kinematics.hpp"
#include "floatquad/model.hpp"
#include "floatquad/observation.hpp"
#include "floatquad/rewards.hpp"
#include "floatquad/rng.hpp"

namespace floatquad {

/// Per-episode domain randomization: uniform in nominal * (1 +- fraction).
struct RandomizationRanges {
  bool enabled = true;
  double foot_mass = 0.33;          // kg
  double foot_mass_frac = 0.30;
  double actuator_friction = 0.45;  // N m
  double actuator_friction_frac = 0.50;
  double kp_frac = 0.20;
  double kd_frac = 0.20;
};

struct EnvConfig {
  Task task = Task::orient2d;
  Variant variant = Variant::asymmetric;
  bool include_pitch_rate = true;

  double sim_freq = 400.0;
  double policy_freq = 100.0;
  int episode_steps = 1000;
  double wall_distance = 4.0;        // jump2d
  double platform_mass = 10.0;       // jump2d, added to the base mass
  Vec2 gravity = Vec2::Zero();       // both 2D tasks float on an air bearing
  double terminal_penalty = -1.0;

  RobotModel robot;
  RewardWeights reward_weights;
  CurriculumSchedule curriculum;
  RandomizationRanges randomization;
  ContactParams contact;
  ObsClipBox obs_clip;

  bool mirror_observations = true;   // jump2d only
  bool wall_centering = false;       // jump2d eval scenarios
  double foot_placement_radius = 0.1;
  double friction_deadband = 0.01;   // rad/s

  int substeps() const {
    const double r = sim_freq / policy_freq;
    const int n = static_cast<int>(r + 0.5);
    if (std::abs(r - n) > 1e-9 || n < 1)
      throw std::invalid_argument("EnvConfig: sim_freq must be an integer multiple of policy_freq");
    return n;
  }
  double sim_dt() const { return 1.0 / sim_freq; }
  double policy_dt() const { return 1.0 / policy_freq; }

  ObsLayout obs_layout() const { return ObsLayout::make(task, variant, include_pitch_rate); }
  int action_dim() const { return variant == Variant::symmetric ? kNumJoints / 2 : kNumJoints; }

  RewardWeights weights_or_default() const { return reward_weights; }
};

/// Per-step output of the environment.
struct StepResult {
  Observation obs;
  double reward = 0.0;
  RewardTerms reward_terms;
  double terminal_penalty_applied = 0.0;
  bool terminated = false;
  bool truncated = false;

  struct Info {
    JointVec applied_torques = JointVec::Zero();  // last substep, post-clip
    PlanarDynamics::Momentum momentum;
    std::optional<CollisionReport> collision;
    double pitch_error = 0.0;  // observed (offset/mirrored) pitch
    Vec2 base_velocity = Vec2::Zero();
    Vec2 base_position = Vec2::Zero();
    Vec2 world_jump_target = Vec2::Zero();
    bool contacted_ground = false;
    bool contacted_far_wall = false;
    bool aborted = false;  // non-finite dynamics
  } info;
};

enum class Wall { none, ground, far };

/// Overrides for scripted evaluation scenarios; unset fields are sampled.
struct ResetOverrides {
  std::optional<double> pitch;
  std::optional<double> pitch_rate;
  std::optional<Vec2> base_velocity;
  std::optional<Vec2> jump_target;
};

/// One planar quadruped task environment (attitude control or wall jumping).
/// Owns its dynamics instance and RNG stream; identical (config, seed)
/// produce bit-identical trajectories.
class QuadEnv {
 public:
  QuadEnv(const EnvConfig& cfg, std::uint64_t seed, std::uint64_t stream = 0)
      : cfg_(cfg),
        layout_(cfg.obs_layout()),
        dyn_(make_dynamics(cfg)),
        kin_(leg_kinematics(cfg.robot)),
        rng_(seed, stream) {
    if (cfg_.task == Task::jump2d) {
      surfaces_.push_back(HalfPlane{Vec2(0.0, 0.0), Vec2(0.0, 1.0)});
      surfaces_.push_back(HalfPlane{Vec2(0.0, cfg_.wall_distance), Vec2(0.0, -1.0)});
    }
    substeps_ = cfg_.substeps();
  }

  const EnvConfig& config() const { return cfg_; }
  const ObsLayout& layout() const { return layout_; }
  int obs_dim() const { return layout_.dim; }
  int action_dim() const { return cfg_.action_dim(); }
  const GeneralizedState& state() const { return state_; }
  const PlanarDynamics& dynamics() const { return dyn_; }
  Rng& rng() { return rng_; }
  int step_count() const { return step_count_; }
  bool episode_active() const { return active_; }
  double eta() const { return eta_; }
  Vec2 jump_target() const { return target_; }
  double pitch_target() const { return pitch_target_; }

  /// Reorientation target used at evaluation time; training keeps it at zero.
  void set_pitch_target(double t) { pitch_target_ = t; }
  void set_jump_target(const Vec2& t) { target_ = t; }

  Observation reset(double eta) { return reset(eta, {}); }

  Observation reset(double eta, const ResetOverrides& ov) {
    if (!(eta > 0.0 && eta <= 1.0) && eta != 0.0)
      throw std::invalid_argument("reset: eta must be in [0, 1]");
    eta_ = eta;
    sample_randomization();
    state_ = GeneralizedState{};
    if (cfg_.task == Task::orient2d) {
      state_.q(0) = 0.0;
      state_.q(1) = 2.0;
      const double pitch = rng_.uniform(-eta * kPi, eta * kPi);
      state_.q(2) = ov.pitch ? *ov.pitch : pitch;
    } else {
      state_.q(0) = 0.0;
      state_.q(1) = 3.0;
      const double vx = rng_.uniform(-0.5 * eta, 0.5 * eta);
      const double vz = rng_.uniform(-1.0, 0.0);  // not curriculum-scaled
      const double pitch = rng_.uniform(-eta * kPi, eta * kPi);
      const double wz = rng_.uniform(-0.25 * eta, 0.25 * eta);
      const double tvx = rng_.uniform(-0.5 * eta, 0.5 * eta);
      const double tvz = rng_.uniform(0.25, 1.0);  // not curriculum-scaled
      state_.q(2) = ov.pitch ? *ov.pitch : pitch;
      const Vec2 v = ov.base_velocity ? *ov.base_velocity : Vec2(vx, vz);
      state_.v(0) = v.x();
      state_.v(1) = v.y();
      state_.v(2) = ov.pitch_rate ? *ov.pitch_rate : wz;
      target_ = ov.jump_target ? *ov.jump_target : Vec2(tvx, tvz);
    }
    place_feet();

    pitch_target_ = 0.0;
    step_count_ = 0;
    active_ = true;
    last_wall_ = Wall::none;
    prev_base_vel_ = Vec2(state_.v(0), state_.v(1));
    return make_observation();
  }

  StepResult step(const VecX& action) {
    if (!active_) throw std::logic_error("step: episode is not active");
    if (action.size() != action_dim()) throw std::invalid_argument("step: wrong action size");

    StepResult res;
    const JointVec q_star_raw = expand_action(action);
    const TargetClipResult tclip = clip_joint_targets(q_star_raw, cfg_.robot.limits);
    const JointVec q_star = tclip.q_clipped;

    double torque_sq_acc = 0.0;
    double clip_residual_sq_acc = 0.0;
    JointVec last_applied = JointVec::Zero();
    bool contacted_ground = false, contacted_far = false;
    std::optional<CollisionReport> collision;

    const double dt = cfg_.sim_dt();
    bool aborted = false;
    for (int sub = 0; sub < substeps_; ++sub) {
      // Reward bookkeeping from the substep's initial state.
      {
        const JointVec q = state_.q.segment<kNumJoints>(kBaseDof);
        const JointVec qd = state_.v.segment<kNumJoints>(kBaseDof);
        const JointVec tau_pd = pd_torques(q_star, q, qd, gains_);
        torque_sq_acc += tau_pd.squaredNorm();
        for (int j = 0; j < kNumJoints; ++j) {
          const double tau_in =
              tau_pd(j) + static_friction_torque(qd(j), friction_mag_, cfg_.friction_deadband);
          const TorqueClipResult c = clip_actuator_torque(tau_in, qd(j), cfg_.robot.actuator);
          clip_residual_sq_acc += c.clip_residual * c.clip_residual;
          last_applied(j) = c.tau;
        }
      }
      const auto controls = [&](const GeneralizedState& x, double) {
        return control_input(x, q_star);
      };
      try {
        state_ = step_rk4(dyn_, state_, controls, dt);
      } catch (const IntegrationError&) {
        aborted = true;
        break;
      } catch (const ModelError&) {
        aborted = true;
        break;
      }

      const BodyKinematics bk = dyn_.body_kinematics(state_);
      for (const auto& hp : surfaces_) {
        for (int k = 0; k < kNumLegs; ++k) {
          const double pen = cfg_.robot.contact_sphere_radius -
                             hp.normal.dot(bk.leg[k].foot - hp.point);
          if (pen > 0.0) {
            if (hp.normal.y() > 0.0) contacted_ground = true;
            else contacted_far = true;
          }
        }
      }
      collision = detect_self_collision(bk, cfg_.robot.virtual_sphere_radius);
      if (collision) break;
    }

    if (contacted_ground) last_wall_ = Wall::ground;
    if (contacted_far) last_wall_ = Wall::far;

    ++step_count_;
    res.terminated = collision.has_value();
    res.truncated = !res.terminated && step_count_ >= cfg_.episode_steps;
    if (aborted) {
      res.info.aborted = true;
      res.terminated = true;
    }
    active_ = !(res.terminated || res.truncated);

    const Vec2 base_vel(state_.v(0), state_.v(1));
    const Vec2 base_accel = (base_vel - prev_base_vel_) / cfg_.policy_dt();
    prev_base_vel_ = base_vel;

    // Mean over the substep count keeps term scale independent of sim_freq.
    const double mean_torque_sq = torque_sq_acc / std::max(1, substeps_);
    const double mean_clip_sq = clip_residual_sq_acc / std::max(1, substeps_);

    res.reward_terms = reward_aux(base_accel, tclip.clip_residual_sq, mean_clip_sq, mean_torque_sq);
    res.reward_terms.orient = reward_orient2d(observed_pitch());
    if (cfg_.task == Task::jump2d)
      res.reward_terms.jump = reward_jump(world_jump_target(), base_vel);
    res.reward = combine_rewards(res.reward_terms, cfg_.reward_weights, cfg_.task);
    if (res.terminated && !aborted) {
      res.terminal_penalty_applied = cfg_.terminal_penalty;
      res.reward += cfg_.terminal_penalty;
    }

    if (cfg_.task == Task::jump2d && cfg_.wall_centering) {
      const double bx = state_.q(0);
      const double eff_bx = last_wall_ == Wall::far ? -bx : bx;
      target_.x() = wall_center_target(eff_bx, cfg_.wall_distance, target_.y());
    }

    res.obs = make_observation();
    res.info.applied_torques = last_applied;
    res.info.momentum = dyn_.total_momentum(state_);
    res.info.collision = collision;
    res.info.pitch_error = observed_pitch();
    res.info.base_velocity = base_vel;
    res.info.base_position = Vec2(state_.q(0), state_.q(1));
    res.info.world_jump_target = world_jump_target();
    res.info.contacted_ground = contacted_ground;
    res.info.contacted_far_wall = contacted_far;
    if (aborted)
      res.info.collision.reset();
    return res;
  }

  /// World-frame velocity target used by the jump reward. After landing on
  /// the far wall the commanded jump points back down; the stored target is
  /// always in ground-frame semantics (positive z).
  Vec2 world_jump_target() const {
    if (cfg_.task != Task::jump2d) return Vec2::Zero();
    if (last_wall_ == Wall::far) return -target_;
    return target_;
  }

  /// Pitch error the policy sees (target offset or mirror applied, wrapped).
  double observed_pitch() const {
    if (cfg_.task == Task::orient2d) return apply_target_offset(state_.q(2), pitch_target_);
    if (cfg_.mirror_observations && mirror_active())
      return wrap_angle(kPi / 2.0 + wrap_angle(state_.q(2)));
    return wrap_angle(state_.q(2));
  }

  bool mirror_active() const {
    return cfg_.task == Task::jump2d && state_.v(1) > 0.0 && state_.q(1) > 0.7;
  }

  Observation make_observation() const {
    Observation obs;
    obs.layout = layout_;
    obs.values.setZero(layout_.dim);
    for (int i = 0; i < layout_.n_leg_joints; ++i) {
      obs.values(layout_.idx_q + i) = wrap_angle(state_.q(kBaseDof + i));
      obs.values(layout_.idx_qd + i) = state_.v(kBaseDof + i);
    }
    double pitch = wrap_angle(state_.q(2));
    if (cfg_.task == Task::orient2d) pitch = apply_target_offset(state_.q(2), pitch_target_);
    obs.values(layout_.idx_pitch) = pitch;
    if (layout_.idx_pitch_rate >= 0) obs.values(layout_.idx_pitch_rate) = state_.v(2);
    if (cfg_.task == Task::jump2d) {
      obs.values(layout_.idx_bz) = state_.q(1);
      obs.values(layout_.idx_vx) = state_.v(0);
      obs.values(layout_.idx_vz) = state_.v(1);
      obs.values(layout_.idx_tvx) = target_.x();
      obs.values(layout_.idx_tvz) = target_.y();
      if (cfg_.mirror_observations) obs = mirror_observation(obs, cfg_.wall_distance);
    }
    clip_observation(obs, cfg_.obs_clip);
    return obs;
  }

  /// Expand a symmetric (left legs only) action so the right side follows
  /// the same trajectory.
  JointVec expand_action(const VecX& action) const {
    JointVec q;
    if (cfg_.variant == Variant::asymmetric) {
      for (int i = 0; i < kNumJoints; ++i) q(i) = action(i);
    } else {
      for (int i = 0; i < kNumJoints / 2; ++i) {
        q(i) = action(i);
        q(i + kNumJoints / 2) = action(i);
      }
    }
    return q;
  }

  void save_state(std::ostream& os) const {
    os.write(reinterpret_cast<const char*>(state_.q.data()), sizeof(double) * kDof);
    os.write(reinterpret_cast<const char*>(state_.v.data()), sizeof(double) * kDof);
    auto wd = [&](double d) { os.write(reinterpret_cast<const char*>(&d), sizeof(d)); };
    wd(eta_);
    wd(pitch_target_);
    wd(target_.x());
    wd(target_.y());
    wd(prev_base_vel_.x());
    wd(prev_base_vel_.y());
    wd(friction_mag_);
    wd(gains_.kp);
    wd(gains_.kd);
    wd(dyn_.foot_mass(0));
    const std::int32_t sc = step_count_;
    os.write(reinterpret_cast<const char*>(&sc), sizeof(sc));
    const std::uint8_t flags = (active_ ? 1 : 0) | (static_cast<int>(last_wall_) << 1);
    os.write(reinterpret_cast<const char*>(&flags), sizeof(flags));
    rng_.save(os);
  }

  void load_state(std::istream& is) {
    is.read(reinterpret_cast<char*>(state_.q.data()), sizeof(double) * kDof);
    is.read(reinterpret_cast<char*>(state_.v.data()), sizeof(double) * kDof);
    auto rd = [&]() {
      double d;
      is.read(reinterpret_cast<char*>(&d), sizeof(d));
      return d;
    };
    eta_ = rd();
    pitch_target_ = rd();
    target_.x() = rd();
    target_.y() = rd();
    prev_base_vel_.x() = rd();
    prev_base_vel_.y() = rd();
    friction_mag_ = rd();
    gains_.kp = rd();
    gains_.kd = rd();
    dyn_.set_foot_mass(rd());
    std::int32_t sc;
    is.read(reinterpret_cast<char*>(&sc), sizeof(sc));
    step_count_ = sc;
    std::uint8_t flags;
    is.read(reinterpret_cast<char*>(&flags), sizeof(flags));
    active_ = (flags & 1) != 0;
    last_wall_ = static_cast<Wall>(flags >> 1);
    rng_.load(is);
  }

 private:
  static PlanarDynamics make_dynamics(const EnvConfig& cfg) {
    RobotModel m = cfg.robot;
    m.gravity = cfg.gravity;
    if (cfg.task == Task::jump2d) m.base.mass += cfg.platform_mass;
    return PlanarDynamics(m);
  }

  ControlInput control_input(const GeneralizedState& x, const JointVec& q_star) const {
    ControlInput u;
    const JointVec q = x.q.segment<kNumJoints>(kBaseDof);
    const JointVec qd = x.v.segment<kNumJoints>(kBaseDof);
    const JointVec tau_pd = pd_torques(q_star, q, qd, gains_);
    for (int j = 0; j < kNumJoints; ++j) {
      const double tau_in =
          tau_pd(j) + static_friction_torque(qd(j), friction_mag_, cfg_.friction_deadband);
      u.torques(j) = clip_actuator_torque(tau_in, qd(j), cfg_.robot.actuator).tau;
    }
    if (!surfaces_.empty()) {
      const BodyKinematics bk = dyn_.body_kinematics(x);
      foot_contact_forces(bk, cfg_.robot.contact_sphere_radius, surfaces_, cfg_.contact,
                          [&](const ContactForce& f) {
                            u.add_force(ExternalForce{2 + 2 * f.leg, f.point, f.force, 0.0});
                          });
    }
    return u;
  }

  void sample_randomization() {
    const auto& r = cfg_.randomization;
    gains_ = cfg_.robot.gains;
    friction_mag_ = 0.0;
    if (r.enabled) {
      const double fm = r.foot_mass * (1.0 + r.foot_mass_frac * (2.0 * rng_.uniform() - 1.0));
      friction_mag_ =
          r.actuator_friction * (1.0 + r.actuator_friction_frac * (2.0 * rng_.uniform() - 1.0));
      gains_.kp = cfg_.robot.gains.kp * (1.0 + r.kp_frac * (2.0 * rng_.uniform() - 1.0));
      gains_.kd = cfg_.robot.gains.kd * (1.0 + r.kd_frac * (2.0 * rng_.uniform() - 1.0));
      dyn_.set_foot_mass(fm);
    } else {
      dyn_.set_foot_mass(r.foot_mass);
      friction_mag_ = r.actuator_friction;
    }
  }

  /// Place each foot uniformly inside a disc around its nominal position via
  /// inverse kinematics; resample on IK failure or initial self-collision.
  void place_feet() {
    const int max_tries = 32;
    for (int attempt = 0; attempt < max_tries; ++attempt) {
      bool ok = true;
      for (int k = 0; k < kNumLegs && ok; ++k) {
        const double rr = cfg_.foot_placement_radius * std::sqrt(rng_.uniform());
        const double th = rng_.uniform(0.0, kTwoPi);
        const Vec2 target = cfg_.robot.nominal_foot_offset + rr * unit_vec(th);
        try {
          const SerialAngles a = kin_.inverse(target);
          state_.q(kBaseDof + 2 * k) = a.shoulder;
          state_.q(kBaseDof + 2 * k + 1) = a.elbow;
        } catch (const ReachabilityError&) {
          ok = false;
        }
      }
      if (!ok) continue;
      const BodyKinematics bk = dyn_.body_kinematics(state_);
      if (!detect_self_collision(bk, cfg_.robot.virtual_sphere_radius)) return;
    }
    // Fall back to the nominal stance, collision-free by construction.
    const SerialAngles a = kin_.inverse(cfg_.robot.nominal_foot_offset);
    for (int k = 0; k < kNumLegs; ++k) {
      state_.q(kBaseDof + 2 * k) = a.shoulder;
      state_.q(kBaseDof + 2 * k + 1) = a.elbow;
    }
  }

  EnvConfig cfg_;
  ObsLayout layout_;
  PlanarDynamics dyn_;
  LegKinematics kin_;
  Rng rng_;
  std::vector<HalfPlane> surfaces_;
  int substeps_ = 4;

  GeneralizedState state_;
  PDGains gains_;
  double friction_mag_ = 0.0;
  double eta_ = 1.0;
  double pitch_target_ = 0.0;
  Vec2 target_ = Vec2::Zero();  // jump target, ground-frame semantics
  Vec2 prev_base_vel_ = Vec2::Zero();
  int step_count_ = 0;
  bool active_ = false;
  Wall last_wall_ = Wall::none;
};

}  // namespace floatquad
