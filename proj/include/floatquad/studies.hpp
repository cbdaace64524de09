#pragma once

#include <string>
#include <vector>

#include "floatquad/actuation.hpp"
#include "floatquad/eval.hpp"
#include "floatquad/integrators.hpp"

namespace floatquad {

/// Free-float excitation used by the integrator studies: sinusoidal PD joint
/// targets around the nominal stance, torques through the actuator envelope.
struct FreeFloatScenario {
  RobotModel model;
  SerialAngles nominal;
  double shoulder_amp = 0.6;
  double elbow_amp = 0.5;
  double shoulder_freq = 0.8;  // Hz
  double elbow_freq = 1.1;     // Hz

  explicit FreeFloatScenario(RobotModel m) : model(std::move(m)) {
    model.gravity = Vec2::Zero();
    nominal = leg_kinematics(model).inverse(model.nominal_foot_offset);
  }

  GeneralizedState initial_state() const {
    GeneralizedState s;
    s.q(1) = 2.0;
    for (int k = 0; k < kNumLegs; ++k) {
      s.q(3 + 2 * k) = nominal.shoulder;
      s.q(4 + 2 * k) = nominal.elbow;
    }
    return s;
  }

  ControlInput controls(const GeneralizedState& x, double t) const {
    ControlInput u;
    JointVec q_star;
    for (int k = 0; k < kNumLegs; ++k) {
      q_star(2 * k) = nominal.shoulder + shoulder_amp * std::sin(kTwoPi * shoulder_freq * t + k);
      q_star(2 * k + 1) = nominal.elbow + elbow_amp * std::sin(kTwoPi * elbow_freq * t + 2.0 + k);
    }
    const JointVec q = x.q.segment<kNumJoints>(kBaseDof);
    const JointVec qd = x.v.segment<kNumJoints>(kBaseDof);
    const JointVec tau = pd_torques(q_star, q, qd, model.gains);
    for (int j = 0; j < kNumJoints; ++j)
      u.torques(j) = clip_actuator_torque(tau(j), qd(j), model.actuator).tau;
    return u;
  }
};

enum class Integrator { euler, rk4 };

struct MomentumStudyRow {
  Integrator integrator;
  double dt = 0.0;
  double max_angular_drift = 0.0;
  double max_linear_drift = 0.0;
  double tolerance_scale = 0.0;  // M_total * (1 m)^2 * (1 rad/s)
};

/// Angular-momentum drift envelope of the free-float scenario per
/// (integrator, dt) pair.
inline std::vector<MomentumStudyRow> momentum_study(const RobotModel& model,
                                                    const std::vector<double>& dt_list,
                                                    const std::vector<Integrator>& integrators,
                                                    double duration) {
  const FreeFloatScenario sc(model);
  const PlanarDynamics dyn(sc.model);
  std::vector<MomentumStudyRow> rows;
  for (const Integrator integ : integrators) {
    for (const double dt : dt_list) {
      GeneralizedState s = sc.initial_state();
      const auto m0 = dyn.total_momentum(s);
      MomentumStudyRow row;
      row.integrator = integ;
      row.dt = dt;
      row.tolerance_scale = dyn.total_mass();
      const auto controls = [&](const GeneralizedState& x, double t) { return sc.controls(x, t); };
      const std::int64_t steps = static_cast<std::int64_t>(duration / dt + 0.5);
      for (std::int64_t i = 0; i < steps; ++i) {
        s = integ == Integrator::rk4 ? step_rk4(dyn, s, controls, dt, i * dt)
                                     : step_euler(dyn, s, controls, dt, i * dt);
        const auto m = dyn.total_momentum(s);
        row.max_angular_drift = std::max(row.max_angular_drift,
                                         std::abs(m.angular_about_com - m0.angular_about_com));
        row.max_linear_drift = std::max(row.max_linear_drift, (m.linear - m0.linear).norm());
      }
      rows.push_back(row);
    }
  }
  return rows;
}

struct SweepRow {
  double foot_mass = 0.0;
  double median_time_to_5deg = 0.0;
  double median_time_to_10deg = 0.0;
  double success_rate = 0.0;
  std::vector<std::vector<double>> pitch_curves;  // per episode |pitch error|(t)
};

/// Fixed 180-degree flip evaluated at each foot mass; randomization is
/// disabled so the mass under test is exact.
inline std::vector<SweepRow> feet_weight_sweep(Controller& controller, const EnvConfig& env_cfg,
                                               const std::vector<double>& masses, int episodes,
                                               std::uint64_t seed) {
  std::vector<SweepRow> rows;
  for (const double m : masses) {
    EnvConfig cfg = env_cfg;
    cfg.randomization.enabled = false;
    cfg.randomization.foot_mass = m;
    SweepRow row;
    row.foot_mass = m;
    std::vector<double> t5, t10;
    int success = 0;
    for (int ep = 0; ep < episodes; ++ep) {
      QuadEnv env(cfg, seed, static_cast<std::uint64_t>(ep));
      ResetOverrides ov;
      ov.pitch = kPi;  // 180-degree flip
      Observation obs = env.reset(1.0, ov);
      controller.reset();
      std::vector<TraceRow> trace;
      for (int t = 0; t < cfg.episode_steps; ++t) {
        const VecX action = controller.act(obs);
        const StepResult res = env.step(action);
        TraceRow r;
        r.time = (t + 1) * cfg.policy_dt();
        r.pitch_error = res.info.pitch_error;
        trace.push_back(r);
        if (res.terminated || res.truncated) break;
        obs = res.obs;
      }
      std::vector<double> curve;
      curve.reserve(trace.size());
      for (const auto& r : trace) curve.push_back(std::abs(r.pitch_error));
      row.pitch_curves.push_back(curve);
      const double deg = kPi / 180.0;
      const double tt5 = detail::stay_below_time(trace, 5.0 * deg);
      const double tt10 = detail::stay_below_time(trace, 10.0 * deg);
      const double cap = cfg.episode_steps * cfg.policy_dt();
      t5.push_back(std::isfinite(tt5) ? tt5 : cap);
      t10.push_back(std::isfinite(tt10) ? tt10 : cap);
      if (std::isfinite(tt5)) ++success;
    }
    auto median = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      const size_t m2 = v.size() / 2;
      return v.size() % 2 == 1 ? v[m2] : 0.5 * (v[m2 - 1] + v[m2]);
    };
    row.median_time_to_5deg = median(t5);
    row.median_time_to_10deg = median(t10);
    row.success_rate = static_cast<double>(success) / episodes;
    rows.push_back(row);
  }
  return rows;
}

/// Grid search over the baseline frequency gain (both turning senses) so the
/// comparison against learned policies is not strawmanned. Returns the gain
/// with the lowest median time-to-5-degrees.
inline double tune_baseline_gain(const BaselineParams& base, const EnvConfig& env_cfg,
                                 const std::vector<double>& gains, int episodes,
                                 std::uint64_t seed) {
  double best_gain = base.frequency_gain;
  double best_score = std::numeric_limits<double>::infinity();
  for (const double g : gains) {
    BaselineParams p = base;
    p.frequency_gain = g;
    EllipseBaselineController ctl(p, env_cfg);
    const EvalReport rep = evaluate(ctl, env_cfg, episodes, Scenario::reorient, seed, false);
    std::vector<double> t5;
    const double cap = env_cfg.episode_steps * env_cfg.policy_dt();
    for (const auto& e : rep.episodes)
      t5.push_back(std::isfinite(e.time_to_5deg) ? e.time_to_5deg : cap);
    std::sort(t5.begin(), t5.end());
    const size_t m = t5.size() / 2;
    const double med = t5.size() % 2 == 1 ? t5[m] : 0.5 * (t5[m - 1] + t5[m]);
    if (med < best_score) {
      best_score = med;
      best_gain = g;
    }
  }
  return best_gain;
}

}  // namespace floatquad
