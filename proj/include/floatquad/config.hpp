#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "floatquad/checkpoint.hpp"
#include "floatquad/env.hpp"
#include "floatquad/ppo.hpp"

namespace floatquad {

/// Elliptic-trajectory baseline parameters (handcrafted controller).
struct BaselineParams {
  Vec2 ellipse_semi_axes = Vec2(0.08, 0.12);  // m
  Vec2 ellipse_center = Vec2(0.0, -0.35);     // m, hip frame
  double frequency_gain = 8.0;                // (rad/s) / rad of pitch error
  double max_phase_rate = 12.0;               // rad/s
  std::array<double, kNumLegs> phase_offsets = {0.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0};

  void validate() const {
    if (!(ellipse_semi_axes.x() > 0.0 && ellipse_semi_axes.y() > 0.0))
      throw std::invalid_argument("BaselineParams: semi-axes must be positive");
  }
};

struct EvalConfig {
  int episodes = 100;
  std::string scenario = "reorient";
  int episode_steps = 0;  // 0 = use the env's episode length
};

/// Top-level run configuration, serialized as a versioned JSON document.
struct RunConfig {
  int version = 1;
  EnvConfig env;
  TrainConfig train;
  BaselineParams baseline;
  EvalConfig eval;

  static RunConfig desk_defaults(Task task, Variant variant) {
    RunConfig c;
    c.env.task = task;
    c.env.variant = variant;
    c.env.reward_weights = RewardWeights::defaults_for(task);
    if (task == Task::jump2d) c.env.variant = Variant::symmetric;
    c.train.total_steps = 5'000'000;
    c.train.n_envs = 16;
    return c;
  }
};

namespace cfgio {

using json = nlohmann::json;

inline std::string task_name(Task t) { return t == Task::orient2d ? "orient2d" : "jump2d"; }
inline Task task_from(const std::string& s) {
  if (s == "orient2d") return Task::orient2d;
  if (s == "jump2d") return Task::jump2d;
  throw std::invalid_argument("unknown task: " + s);
}
inline std::string variant_name(Variant v) {
  return v == Variant::symmetric ? "symmetric" : "asymmetric";
}
inline Variant variant_from(const std::string& s) {
  if (s == "symmetric") return Variant::symmetric;
  if (s == "asymmetric") return Variant::asymmetric;
  throw std::invalid_argument("unknown variant: " + s);
}

inline json to_json(const RunConfig& c) {
  json j;
  j["version"] = c.version;

  json e;
  e["task"] = task_name(c.env.task);
  e["variant"] = variant_name(c.env.variant);
  e["include_pitch_rate"] = c.env.include_pitch_rate;
  e["sim_freq"] = c.env.sim_freq;
  e["policy_freq"] = c.env.policy_freq;
  e["episode_steps"] = c.env.episode_steps;
  e["wall_distance"] = c.env.wall_distance;
  e["platform_mass"] = c.env.platform_mass;
  e["gravity"] = {c.env.gravity.x(), c.env.gravity.y()};
  e["terminal_penalty"] = c.env.terminal_penalty;
  e["mirror_observations"] = c.env.mirror_observations;
  e["wall_centering"] = c.env.wall_centering;
  e["foot_placement_radius"] = c.env.foot_placement_radius;
  e["friction_deadband"] = c.env.friction_deadband;
  e["reward_weights"] = {c.env.reward_weights.c0, c.env.reward_weights.c1,
                         c.env.reward_weights.c2, c.env.reward_weights.c3,
                         c.env.reward_weights.c4, c.env.reward_weights.c5,
                         c.env.reward_weights.c6};
  e["curriculum"] = {{"eta_start", c.env.curriculum.eta_start},
                     {"eta_end", c.env.curriculum.eta_end},
                     {"ramp_fraction", c.env.curriculum.ramp_fraction}};
  e["randomization"] = {{"enabled", c.env.randomization.enabled},
                        {"foot_mass", c.env.randomization.foot_mass},
                        {"foot_mass_frac", c.env.randomization.foot_mass_frac},
                        {"actuator_friction", c.env.randomization.actuator_friction},
                        {"actuator_friction_frac", c.env.randomization.actuator_friction_frac},
                        {"kp_frac", c.env.randomization.kp_frac},
                        {"kd_frac", c.env.randomization.kd_frac}};
  e["contact"] = {{"normal_stiffness", c.env.contact.normal_stiffness},
                  {"normal_damping", c.env.contact.normal_damping},
                  {"friction_coeff", c.env.contact.friction_coeff},
                  {"tangential_regularization_velocity",
                   c.env.contact.tangential_regularization_velocity}};
  e["obs_clip"] = {{"angle", c.env.obs_clip.angle},
                   {"rate", c.env.obs_clip.rate},
                   {"height", c.env.obs_clip.height},
                   {"velocity", c.env.obs_clip.velocity}};

  const RobotModel& r = c.env.robot;
  json rj;
  rj["base"] = {{"mass", r.base.mass}, {"inertia", r.base.inertia_about_com},
                {"length", r.base.length}};
  rj["upper"] = {{"mass", r.upper.mass}, {"inertia", r.upper.inertia_about_com},
                 {"com_x", r.upper.com_offset.x()}, {"length", r.upper.length}};
  rj["lower"] = {{"mass", r.lower.mass}, {"inertia", r.lower.inertia_about_com},
                 {"com_x", r.lower.com_offset.x()}, {"length", r.lower.length},
                 {"foot_mass", r.lower.attached_point_mass}};
  rj["hip_x"] = r.hip_offsets[0].x();
  rj["nominal_foot_offset"] = {r.nominal_foot_offset.x(), r.nominal_foot_offset.y()};
  rj["actuator"] = {{"tau_h", r.actuator.tau_h}, {"qdot_safe", r.actuator.qdot_safe},
                    {"qdot_h", r.actuator.qdot_h}};
  rj["pd"] = {{"kp", r.gains.kp}, {"kd", r.gains.kd}};
  rj["limits"] = {{"shoulder_lo", r.limits.shoulder_lo}, {"shoulder_hi", r.limits.shoulder_hi},
                  {"elbow_lo", r.limits.elbow_lo}, {"elbow_hi", r.limits.elbow_hi}};
  rj["virtual_sphere_radius"] = r.virtual_sphere_radius;
  rj["contact_sphere_radius"] = r.contact_sphere_radius;
  e["robot"] = rj;
  j["env"] = e;

  json t;
  t["total_steps"] = c.train.total_steps;
  t["steps_per_update"] = c.train.steps_per_update;
  t["minibatch_size"] = c.train.minibatch_size;
  t["gamma"] = c.train.gamma;
  t["gae_lambda"] = c.train.gae_lambda;
  t["clip_range"] = c.train.clip_range;
  t["epochs_per_update"] = c.train.epochs_per_update;
  t["entropy_coef"] = c.train.entropy_coef;
  t["value_coef"] = c.train.value_coef;
  t["max_grad_norm"] = c.train.max_grad_norm;
  t["learning_rate"] = c.train.learning_rate;
  t["lr_decay_start_fraction"] = c.train.lr_decay_start_fraction;
  t["lr_final_fraction"] = c.train.lr_final_fraction;
  t["n_envs"] = c.train.n_envs;
  t["seed"] = c.train.seed;
  t["checkpoint_every_updates"] = c.train.checkpoint_every_updates;
  j["train"] = t;

  json b;
  b["ellipse_semi_axes"] = {c.baseline.ellipse_semi_axes.x(), c.baseline.ellipse_semi_axes.y()};
  b["ellipse_center"] = {c.baseline.ellipse_center.x(), c.baseline.ellipse_center.y()};
  b["frequency_gain"] = c.baseline.frequency_gain;
  b["max_phase_rate"] = c.baseline.max_phase_rate;
  b["phase_offsets"] = {c.baseline.phase_offsets[0], c.baseline.phase_offsets[1],
                        c.baseline.phase_offsets[2], c.baseline.phase_offsets[3]};
  j["baseline"] = b;

  json ev;
  ev["episodes"] = c.eval.episodes;
  ev["scenario"] = c.eval.scenario;
  ev["episode_steps"] = c.eval.episode_steps;
  j["eval"] = ev;
  return j;
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline void from_json(const json& j, RunConfig& c) {
  maybe(j, "version", c.version);
  if (c.version != 1) throw std::invalid_argument("config: unsupported version");
  if (j.contains("env")) {
    const json& e = j.at("env");
    if (e.contains("task")) c.env.task = task_from(e.at("task").get<std::string>());
    if (e.contains("variant")) c.env.variant = variant_from(e.at("variant").get<std::string>());
    maybe(e, "include_pitch_rate", c.env.include_pitch_rate);
    maybe(e, "sim_freq", c.env.sim_freq);
    maybe(e, "policy_freq", c.env.policy_freq);
    maybe(e, "episode_steps", c.env.episode_steps);
    maybe(e, "wall_distance", c.env.wall_distance);
    maybe(e, "platform_mass", c.env.platform_mass);
    if (e.contains("gravity"))
      c.env.gravity = Vec2(e.at("gravity")[0].get<double>(), e.at("gravity")[1].get<double>());
    maybe(e, "terminal_penalty", c.env.terminal_penalty);
    maybe(e, "mirror_observations", c.env.mirror_observations);
    maybe(e, "wall_centering", c.env.wall_centering);
    maybe(e, "foot_placement_radius", c.env.foot_placement_radius);
    maybe(e, "friction_deadband", c.env.friction_deadband);
    if (e.contains("reward_weights")) {
      const auto& w = e.at("reward_weights");
      c.env.reward_weights.c0 = w[0];
      c.env.reward_weights.c1 = w[1];
      c.env.reward_weights.c2 = w[2];
      c.env.reward_weights.c3 = w[3];
      c.env.reward_weights.c4 = w[4];
      c.env.reward_weights.c5 = w[5];
      c.env.reward_weights.c6 = w[6];
    }
    if (e.contains("curriculum")) {
      const auto& cu = e.at("curriculum");
      maybe(cu, "eta_start", c.env.curriculum.eta_start);
      maybe(cu, "eta_end", c.env.curriculum.eta_end);
      maybe(cu, "ramp_fraction", c.env.curriculum.ramp_fraction);
    }
    if (e.contains("randomization")) {
      const auto& ra = e.at("randomization");
      maybe(ra, "enabled", c.env.randomization.enabled);
      maybe(ra, "foot_mass", c.env.randomization.foot_mass);
      maybe(ra, "foot_mass_frac", c.env.randomization.foot_mass_frac);
      maybe(ra, "actuator_friction", c.env.randomization.actuator_friction);
      maybe(ra, "actuator_friction_frac", c.env.randomization.actuator_friction_frac);
      maybe(ra, "kp_frac", c.env.randomization.kp_frac);
      maybe(ra, "kd_frac", c.env.randomization.kd_frac);
    }
    if (e.contains("contact")) {
      const auto& co = e.at("contact");
      maybe(co, "normal_stiffness", c.env.contact.normal_stiffness);
      maybe(co, "normal_damping", c.env.contact.normal_damping);
      maybe(co, "friction_coeff", c.env.contact.friction_coeff);
      maybe(co, "tangential_regularization_velocity",
            c.env.contact.tangential_regularization_velocity);
    }
    if (e.contains("obs_clip")) {
      const auto& ob = e.at("obs_clip");
      maybe(ob, "angle", c.env.obs_clip.angle);
      maybe(ob, "rate", c.env.obs_clip.rate);
      maybe(ob, "height", c.env.obs_clip.height);
      maybe(ob, "velocity", c.env.obs_clip.velocity);
    }
    if (e.contains("robot")) {
      const auto& r = e.at("robot");
      RobotModel& m = c.env.robot;
      if (r.contains("base")) {
        maybe(r.at("base"), "mass", m.base.mass);
        maybe(r.at("base"), "inertia", m.base.inertia_about_com);
        maybe(r.at("base"), "length", m.base.length);
      }
      if (r.contains("upper")) {
        maybe(r.at("upper"), "mass", m.upper.mass);
        maybe(r.at("upper"), "inertia", m.upper.inertia_about_com);
        maybe(r.at("upper"), "length", m.upper.length);
        double cx = m.upper.com_offset.x();
        maybe(r.at("upper"), "com_x", cx);
        m.upper.com_offset = Vec2(cx, 0.0);
      }
      if (r.contains("lower")) {
        maybe(r.at("lower"), "mass", m.lower.mass);
        maybe(r.at("lower"), "inertia", m.lower.inertia_about_com);
        maybe(r.at("lower"), "length", m.lower.length);
        maybe(r.at("lower"), "foot_mass", m.lower.attached_point_mass);
        double cx = m.lower.com_offset.x();
        maybe(r.at("lower"), "com_x", cx);
        m.lower.com_offset = Vec2(cx, 0.0);
      }
      if (r.contains("hip_x")) {
        const double hx = r.at("hip_x").get<double>();
        m.hip_offsets = {Vec2(hx, 0.0), Vec2(-hx, 0.0), Vec2(hx, 0.0), Vec2(-hx, 0.0)};
      }
      if (r.contains("nominal_foot_offset"))
        m.nominal_foot_offset = Vec2(r.at("nominal_foot_offset")[0].get<double>(),
                                     r.at("nominal_foot_offset")[1].get<double>());
      if (r.contains("actuator")) {
        maybe(r.at("actuator"), "tau_h", m.actuator.tau_h);
        maybe(r.at("actuator"), "qdot_safe", m.actuator.qdot_safe);
        maybe(r.at("actuator"), "qdot_h", m.actuator.qdot_h);
      }
      if (r.contains("pd")) {
        maybe(r.at("pd"), "kp", m.gains.kp);
        maybe(r.at("pd"), "kd", m.gains.kd);
      }
      if (r.contains("limits")) {
        maybe(r.at("limits"), "shoulder_lo", m.limits.shoulder_lo);
        maybe(r.at("limits"), "shoulder_hi", m.limits.shoulder_hi);
        maybe(r.at("limits"), "elbow_lo", m.limits.elbow_lo);
        maybe(r.at("limits"), "elbow_hi", m.limits.elbow_hi);
      }
      maybe(r, "virtual_sphere_radius", m.virtual_sphere_radius);
      maybe(r, "contact_sphere_radius", m.contact_sphere_radius);
    }
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    maybe(t, "total_steps", c.train.total_steps);
    maybe(t, "steps_per_update", c.train.steps_per_update);
    maybe(t, "minibatch_size", c.train.minibatch_size);
    maybe(t, "gamma", c.train.gamma);
    maybe(t, "gae_lambda", c.train.gae_lambda);
    maybe(t, "clip_range", c.train.clip_range);
    maybe(t, "epochs_per_update", c.train.epochs_per_update);
    maybe(t, "entropy_coef", c.train.entropy_coef);
    maybe(t, "value_coef", c.train.value_coef);
    maybe(t, "max_grad_norm", c.train.max_grad_norm);
    maybe(t, "learning_rate", c.train.learning_rate);
    maybe(t, "lr_decay_start_fraction", c.train.lr_decay_start_fraction);
    maybe(t, "lr_final_fraction", c.train.lr_final_fraction);
    maybe(t, "n_envs", c.train.n_envs);
    maybe(t, "seed", c.train.seed);
    maybe(t, "checkpoint_every_updates", c.train.checkpoint_every_updates);
  }
  if (j.contains("baseline")) {
    const json& b = j.at("baseline");
    if (b.contains("ellipse_semi_axes"))
      c.baseline.ellipse_semi_axes = Vec2(b.at("ellipse_semi_axes")[0].get<double>(),
                                          b.at("ellipse_semi_axes")[1].get<double>());
    if (b.contains("ellipse_center"))
      c.baseline.ellipse_center = Vec2(b.at("ellipse_center")[0].get<double>(),
                                       b.at("ellipse_center")[1].get<double>());
    maybe(b, "frequency_gain", c.baseline.frequency_gain);
    maybe(b, "max_phase_rate", c.baseline.max_phase_rate);
    if (b.contains("phase_offsets"))
      for (int i = 0; i < kNumLegs; ++i) c.baseline.phase_offsets[i] = b.at("phase_offsets")[i];
  }
  if (j.contains("eval")) {
    const json& ev = j.at("eval");
    maybe(ev, "episodes", c.eval.episodes);
    maybe(ev, "scenario", c.eval.scenario);
    maybe(ev, "episode_steps", c.eval.episode_steps);
  }
}

}  // namespace cfgio

inline std::string dump_config(const RunConfig& c) { return cfgio::to_json(c).dump(2) + "\n"; }

inline std::uint64_t config_hash(const RunConfig& c) { return fnv1a64(dump_config(c)); }

inline RunConfig load_config_string(const std::string& text, RunConfig base = {}) {
  const auto j = cfgio::json::parse(text);
  cfgio::from_json(j, base);
  return base;
}

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_config_string(ss.str(), base);
}

inline void save_config_file(const std::string& path, const RunConfig& c) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("config: cannot write " + path);
  f << dump_config(c);
}

}  // namespace floatquad
