#pragma once

#include "floatquad/checkpoint.hpp"
#include "floatquad/config.hpp"
#include "floatquad/env.hpp"
#include "floatquad/kinematics.hpp"

namespace floatquad {

/// Action source driven by raw environment observations.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual void reset() {}
  virtual VecX act(const Observation& obs) = 0;
};

/// Learned policy wrapper: deterministic mean action on normalized inputs.
class PolicyController : public Controller {
 public:
  explicit PolicyController(Checkpoint ck) : ck_(std::move(ck)) {}

  VecX act(const Observation& obs) override {
    const VecX x = ck_.has_normalizer ? ck_.normalizer.normalize(obs.values) : obs.values;
    return ck_.policy.deterministic_act(x);
  }

  const Checkpoint& checkpoint() const { return ck_; }

 private:
  Checkpoint ck_;
};

/// Handcrafted baseline: each foot follows an ellipse in the hip frame, the
/// phase rate proportional to the pitch error (clamped). The asymmetric
/// variant staggers the legs with fixed phase offsets. Joint targets come
/// from inverse kinematics and go through the exact same clipping path as
/// learned actions.
class EllipseBaselineController : public Controller {
 public:
  EllipseBaselineController(const BaselineParams& p, const EnvConfig& env_cfg)
      : params_(p),
        kin_(leg_kinematics(env_cfg.robot)),
        variant_(env_cfg.variant),
        dt_(env_cfg.policy_dt()) {
    params_.validate();
    reset();
  }

  void reset() override {
    phase_ = 0.0;
    last_action_ = nominal_action();
    have_last_ = false;
  }

  VecX act(const Observation& obs) override {
    const double err = obs.values(obs.layout.idx_pitch);
    const double rate = clamp(params_.frequency_gain * err, -params_.max_phase_rate,
                              params_.max_phase_rate);
    phase_ += rate * dt_;

    const int n_legs = variant_ == Variant::symmetric ? 2 : kNumLegs;
    VecX action(2 * n_legs);
    for (int i = 0; i < n_legs; ++i) {
      const double off = variant_ == Variant::symmetric ? 0.0 : params_.phase_offsets[i];
      const double th = phase_ + off;
      const Vec2 target = params_.ellipse_center +
                          Vec2(params_.ellipse_semi_axes.x() * std::cos(th),
                               params_.ellipse_semi_axes.y() * std::sin(th));
      try {
        const SerialAngles a = kin_.inverse(target);
        action(2 * i) = a.shoulder;
        action(2 * i + 1) = a.elbow;
      } catch (const ReachabilityError&) {
        // Hold the previous target for this leg.
        action(2 * i) = last_action_(2 * i);
        action(2 * i + 1) = last_action_(2 * i + 1);
      }
    }
    last_action_ = action;
    have_last_ = true;
    return action;
  }

  double phase() const { return phase_; }

 private:
  VecX nominal_action() const {
    const int n_legs = variant_ == Variant::symmetric ? 2 : kNumLegs;
    VecX a(2 * n_legs);
    const SerialAngles nom = kin_.inverse(params_.ellipse_center);
    for (int i = 0; i < n_legs; ++i) {
      a(2 * i) = nom.shoulder;
      a(2 * i + 1) = nom.elbow;
    }
    return a;
  }

  BaselineParams params_;
  LegKinematics kin_;
  Variant variant_;
  double dt_;
  double phase_ = 0.0;
  VecX last_action_;
  bool have_last_ = false;
};

}  // namespace floatquad
