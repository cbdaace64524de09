#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "floatquad/baseline.hpp"
#include "floatquad/config.hpp"
#include "floatquad/env.hpp"

namespace floatquad {

enum class Scenario { reorient, step_targets, throw_and_jump, wall_bounce };

inline Scenario scenario_from(const std::string& s) {
  if (s == "reorient") return Scenario::reorient;
  if (s == "step_targets") return Scenario::step_targets;
  if (s == "throw_and_jump") return Scenario::throw_and_jump;
  if (s == "wall_bounce") return Scenario::wall_bounce;
  throw std::invalid_argument("unknown scenario: " + s);
}

/// One logged policy step of an evaluation episode.
struct TraceRow {
  double time = 0.0;
  Vec11 q, v;
  VecX action;
  double reward = 0.0;
  RewardTerms terms;
  double pitch_error = 0.0;
  double pitch_target = 0.0;
  bool terminated = false, truncated = false;
  bool contact_ground = false, contact_far = false;
};

struct EpisodeReport {
  std::uint64_t env_stream = 0;
  ResetOverrides overrides;
  double initial_pitch = 0.0;
  double total_reward = 0.0;
  int steps = 0;
  bool collided = false;
  bool failed = false;  // controller threw or env aborted

  // Times are "enters and stays below" thresholds; infinity when never.
  double time_to_10deg = 0.0;
  double time_to_5deg = 0.0;
  double time_to_half_deg = 0.0;
  double final_abs_error = 0.0;

  int consecutive_jumps = 0;     // completed wall-to-wall transits
  double jump_rel_error = -1.0;  // first-jump velocity tracking, -1 if no jump

  std::vector<TraceRow> trace;
  std::vector<VecX> actions;  // for the replay oracle
};

struct EvalReport {
  Scenario scenario = Scenario::reorient;
  std::vector<EpisodeReport> episodes;

  double success_rate = 0.0;  // scenario-specific success
  double median_time_to_5deg = 0.0;
  double mean_final_error = 0.0;
  double mean_consecutive_jumps = 0.0;
  double mean_jump_rel_error = 0.0;

  /// Success: reorientation scenarios require the 10-degree band reached and
  /// held within the time limit; wall_bounce requires min_jumps transits
  /// without collision.
  void finalize(double success_time_limit = 5.0, int min_jumps = 3) {
    if (episodes.empty()) return;
    std::vector<double> t5;
    double fin = 0.0, jumps = 0.0, jerr = 0.0;
    int n_success = 0, n_jerr = 0;
    for (const auto& e : episodes) {
      t5.push_back(e.time_to_5deg);
      fin += e.final_abs_error;
      jumps += e.consecutive_jumps;
      if (e.jump_rel_error >= 0.0) {
        jerr += e.jump_rel_error;
        ++n_jerr;
      }
      bool success = false;
      if (scenario == Scenario::wall_bounce)
        success = !e.collided && !e.failed && e.consecutive_jumps >= min_jumps;
      else
        success = !e.failed && std::isfinite(e.time_to_10deg) &&
                  e.time_to_10deg <= success_time_limit;
      if (success) ++n_success;
    }
    success_rate = static_cast<double>(n_success) / episodes.size();
    std::sort(t5.begin(), t5.end());
    const size_t m = t5.size() / 2;
    median_time_to_5deg =
        t5.size() % 2 == 1 ? t5[m] : 0.5 * (t5[m - 1] + t5[m]);
    mean_final_error = fin / episodes.size();
    mean_consecutive_jumps = jumps / episodes.size();
    mean_jump_rel_error = n_jerr > 0 ? jerr / n_jerr : -1.0;
  }
};

namespace detail {

/// First time from which |err| stays below the threshold until episode end;
/// zero when the band is never left, infinity when never reached.
inline double stay_below_time(const std::vector<TraceRow>& trace, double threshold) {
  double t = std::numeric_limits<double>::infinity();
  bool all = !trace.empty();
  for (auto it = trace.rbegin(); it != trace.rend(); ++it) {
    if (std::abs(it->pitch_error) <= threshold) {
      t = it->time;
    } else {
      all = false;
      break;
    }
  }
  return all ? 0.0 : t;
}

}  // namespace detail

/// Run `episodes` scripted evaluation episodes; deterministic for a fixed
/// (config, seed). Traces and logged actions allow exact replay.
inline EvalReport evaluate(Controller& controller, const EnvConfig& env_cfg, int episodes,
                           Scenario scenario, std::uint64_t seed, bool keep_traces = true) {
  EvalReport report;
  report.scenario = scenario;
  Rng scenario_rng(seed, 7777);

  EnvConfig cfg = env_cfg;
  if (scenario == Scenario::wall_bounce) {
    cfg.mirror_observations = true;
    cfg.wall_centering = true;
  }

  const double deg = kPi / 180.0;
  for (int ep = 0; ep < episodes; ++ep) {
    EpisodeReport er;
    er.env_stream = static_cast<std::uint64_t>(ep);
    QuadEnv env(cfg, seed, er.env_stream);

    ResetOverrides ov;
    std::vector<double> target_schedule;  // step_targets scenario
    switch (scenario) {
      case Scenario::reorient:
        ov.pitch = scenario_rng.uniform(-kPi / 2.0, kPi / 2.0);
        break;
      case Scenario::step_targets:
        ov.pitch = 0.0;
        target_schedule = {kPi / 2.0, -kPi / 2.0, kPi, 0.0, kPi / 2.0};
        break;
      case Scenario::throw_and_jump: {
        ov.pitch = scenario_rng.uniform(-kPi, kPi);
        ov.base_velocity = Vec2(scenario_rng.uniform(-0.3, 0.3), -0.8);
        ov.jump_target = Vec2(scenario_rng.uniform(-0.3, 0.3), scenario_rng.uniform(0.4, 0.9));
        break;
      }
      case Scenario::wall_bounce: {
        ov.pitch = scenario_rng.uniform(-kPi / 2.0, kPi / 2.0);
        ov.base_velocity = Vec2(0.0, scenario_rng.uniform(-0.8, -0.4));
        ov.pitch_rate = 0.0;
        ov.jump_target = Vec2(0.0, scenario_rng.uniform(0.4, 0.8));
        break;
      }
    }
    er.overrides = ov;

    Observation obs = env.reset(1.0, ov);
    er.initial_pitch = env.state().q(2);
    controller.reset();

    const double dt = cfg.policy_dt();
    const int seg_steps = cfg.episode_steps / std::max<size_t>(1, target_schedule.size());
    Wall last_contact = Wall::none;
    bool in_ground_contact = false;
    bool first_jump_measured = false;
    Vec2 first_jump_target = Vec2::Zero();

    for (int t = 0; t < cfg.episode_steps; ++t) {
      if (!target_schedule.empty()) {
        const size_t seg = std::min<size_t>(t / seg_steps, target_schedule.size() - 1);
        env.set_pitch_target(target_schedule[seg]);
        if (t % seg_steps == 0) obs = env.make_observation();
      }
      VecX action;
      try {
        action = controller.act(obs);
      } catch (const std::exception&) {
        er.failed = true;
        break;
      }
      StepResult res = env.step(action);
      er.actions.push_back(action);
      er.total_reward += res.reward;
      ++er.steps;

      TraceRow row;
      row.time = (t + 1) * dt;
      row.q = env.state().q;
      row.v = env.state().v;
      row.action = action;
      row.reward = res.reward;
      row.terms = res.reward_terms;
      row.pitch_error = res.info.pitch_error;
      row.pitch_target = env.pitch_target();
      row.terminated = res.terminated;
      row.truncated = res.truncated;
      row.contact_ground = res.info.contacted_ground;
      row.contact_far = res.info.contacted_far_wall;
      er.trace.push_back(row);

      // Wall-transit counting and first-jump velocity tracking.
      if (res.info.contacted_ground || res.info.contacted_far_wall) {
        const Wall w = res.info.contacted_far_wall ? Wall::far : Wall::ground;
        if (last_contact != Wall::none && w != last_contact) ++er.consecutive_jumps;
        last_contact = w;
      }
      if (res.info.contacted_ground) {
        in_ground_contact = true;
        first_jump_target = res.info.world_jump_target;
      } else if (in_ground_contact && !first_jump_measured) {
        // Just left the ground: measure achieved jump velocity.
        const Vec2 v = res.info.base_velocity;
        if (first_jump_target.norm() > 1e-9)
          er.jump_rel_error = (v - first_jump_target).norm() / first_jump_target.norm();
        first_jump_measured = true;
        in_ground_contact = false;
      }

      if (res.terminated) {
        er.collided = res.info.collision.has_value();
        er.failed = er.failed || res.info.aborted;
        break;
      }
      obs = res.obs;
      if (res.truncated) break;
    }

    er.time_to_10deg = detail::stay_below_time(er.trace, 10.0 * deg);
    er.time_to_5deg = detail::stay_below_time(er.trace, 5.0 * deg);
    er.time_to_half_deg = detail::stay_below_time(er.trace, 0.5 * deg);
    er.final_abs_error = er.trace.empty() ? 0.0 : std::abs(er.trace.back().pitch_error);
    if (!keep_traces) er.trace.clear();
    report.episodes.push_back(std::move(er));
  }
  report.finalize();
  return report;
}

/// Replay logged actions through a fresh identically-seeded environment and
/// return the per-step rewards (the independent check of reported numbers).
inline std::vector<double> replay_rewards(const EnvConfig& env_cfg, std::uint64_t seed,
                                          const EpisodeReport& er, Scenario scenario) {
  EnvConfig cfg = env_cfg;
  if (scenario == Scenario::wall_bounce) {
    cfg.mirror_observations = true;
    cfg.wall_centering = true;
  }
  QuadEnv env(cfg, seed, er.env_stream);
  env.reset(1.0, er.overrides);
  std::vector<double> rewards;
  rewards.reserve(er.actions.size());
  const int seg_steps =
      cfg.episode_steps / (scenario == Scenario::step_targets ? 5 : 1);
  const std::vector<double> schedule = {kPi / 2.0, -kPi / 2.0, kPi, 0.0, kPi / 2.0};
  for (size_t t = 0; t < er.actions.size(); ++t) {
    if (scenario == Scenario::step_targets) {
      const size_t seg = std::min<size_t>(t / seg_steps, schedule.size() - 1);
      env.set_pitch_target(schedule[seg]);
    }
    const StepResult res = env.step(er.actions[t]);
    rewards.push_back(res.reward);
    if (res.terminated || res.truncated) break;
  }
  return rewards;
}

}  // namespace floatquad
