#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "floatquad/eval.hpp"
#include "floatquad/ppo.hpp"
#include "floatquad/studies.hpp"

namespace floatquad {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Append-only metrics sink writing both CSV and line-delimited JSON.
class MetricsWriter {
 public:
  MetricsWriter() = default;
  MetricsWriter(const std::string& csv_path, const std::string& jsonl_path)
      : csv_(csv_path, std::ios::app), jsonl_(jsonl_path, std::ios::app) {
    if (!csv_ || !jsonl_) throw std::runtime_error("metrics: cannot open output files");
    if (csv_.tellp() == 0)
      csv_ << "update,global_steps,lr,eta,episodes,mean_episode_reward,mean_episode_length,"
              "mean_final_abs_pitch,clip_fraction,approx_kl,policy_loss,value_loss,entropy,"
              "wall_time_s\n";
  }

  void write(const MetricsRow& r) {
    csv_ << r.update << ',' << r.global_steps << ',' << fmt_double(r.lr) << ','
         << fmt_double(r.eta) << ',' << r.episodes << ',' << fmt_double(r.mean_episode_reward)
         << ',' << fmt_double(r.mean_episode_length) << ',' << fmt_double(r.mean_final_metric)
         << ',' << fmt_double(r.clip_fraction) << ',' << fmt_double(r.approx_kl) << ','
         << fmt_double(r.policy_loss) << ',' << fmt_double(r.value_loss) << ','
         << fmt_double(r.entropy) << ',' << fmt_double(r.wall_time_s) << '\n';
    csv_.flush();
    nlohmann::json j;
    j["update"] = r.update;
    j["global_steps"] = r.global_steps;
    j["lr"] = r.lr;
    j["eta"] = r.eta;
    j["episodes"] = r.episodes;
    j["mean_episode_reward"] = r.mean_episode_reward;
    j["mean_episode_length"] = r.mean_episode_length;
    j["mean_final_abs_pitch"] = r.mean_final_metric;
    j["clip_fraction"] = r.clip_fraction;
    j["approx_kl"] = r.approx_kl;
    j["policy_loss"] = r.policy_loss;
    j["value_loss"] = r.value_loss;
    j["entropy"] = r.entropy;
    j["wall_time_s"] = r.wall_time_s;
    jsonl_ << j.dump() << '\n';
    jsonl_.flush();
  }

 private:
  std::ofstream csv_;
  std::ofstream jsonl_;
};

/// Episode trace CSV: one row per policy step.
inline void write_trace_csv(const std::string& path, const EpisodeReport& er) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("trace: cannot write " + path);
  f << "time";
  for (int i = 0; i < kDof; ++i) f << ",q" << i;
  for (int i = 0; i < kDof; ++i) f << ",v" << i;
  const int act_dim = er.actions.empty() ? 0 : static_cast<int>(er.actions[0].size());
  for (int i = 0; i < act_dim; ++i) f << ",a" << i;
  f << ",reward,r_orient,r_base_acc,r_action_clip,r_torque_clip,r_jump,r_torque,"
       "pitch_error,pitch_target,terminated,truncated,contact_ground,contact_far\n";
  for (const auto& r : er.trace) {
    f << fmt_double(r.time);
    for (int i = 0; i < kDof; ++i) f << ',' << fmt_double(r.q(i));
    for (int i = 0; i < kDof; ++i) f << ',' << fmt_double(r.v(i));
    for (int i = 0; i < act_dim; ++i)
      f << ',' << fmt_double(i < r.action.size() ? r.action(i) : 0.0);
    f << ',' << fmt_double(r.reward) << ',' << fmt_double(r.terms.orient) << ','
      << fmt_double(r.terms.base_acc) << ',' << fmt_double(r.terms.action_clip) << ','
      << fmt_double(r.terms.torque_clip) << ',' << fmt_double(r.terms.jump) << ','
      << fmt_double(r.terms.torque) << ',' << fmt_double(r.pitch_error) << ','
      << fmt_double(r.pitch_target) << ',' << (r.terminated ? 1 : 0) << ','
      << (r.truncated ? 1 : 0) << ',' << (r.contact_ground ? 1 : 0) << ','
      << (r.contact_far ? 1 : 0) << '\n';
  }
}

inline nlohmann::json report_json(const EvalReport& rep) {
  nlohmann::json j;
  j["scenario"] = static_cast<int>(rep.scenario);
  j["episodes"] = rep.episodes.size();
  j["success_rate"] = rep.success_rate;
  j["median_time_to_5deg"] = rep.median_time_to_5deg;
  j["mean_final_error"] = rep.mean_final_error;
  j["mean_consecutive_jumps"] = rep.mean_consecutive_jumps;
  j["mean_jump_rel_error"] = rep.mean_jump_rel_error;
  nlohmann::json eps = nlohmann::json::array();
  for (const auto& e : rep.episodes) {
    nlohmann::json je;
    je["initial_pitch"] = e.initial_pitch;
    je["total_reward"] = e.total_reward;
    je["steps"] = e.steps;
    je["collided"] = e.collided;
    je["failed"] = e.failed;
    je["time_to_10deg"] = std::isfinite(e.time_to_10deg) ? e.time_to_10deg : -1.0;
    je["time_to_5deg"] = std::isfinite(e.time_to_5deg) ? e.time_to_5deg : -1.0;
    je["time_to_half_deg"] = std::isfinite(e.time_to_half_deg) ? e.time_to_half_deg : -1.0;
    je["final_abs_error"] = e.final_abs_error;
    je["consecutive_jumps"] = e.consecutive_jumps;
    je["jump_rel_error"] = e.jump_rel_error;
    eps.push_back(je);
  }
  j["per_episode"] = eps;
  return j;
}

inline void write_momentum_csv(const std::string& path, const std::vector<MomentumStudyRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("momentum: cannot write " + path);
  f << "integrator,dt,max_angular_drift,max_linear_drift,tolerance_scale\n";
  for (const auto& r : rows)
    f << (r.integrator == Integrator::rk4 ? "rk4" : "euler") << ',' << fmt_double(r.dt) << ','
      << fmt_double(r.max_angular_drift) << ',' << fmt_double(r.max_linear_drift) << ','
      << fmt_double(r.tolerance_scale) << '\n';
}

inline void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("sweep: cannot write " + path);
  f << "foot_mass,median_time_to_5deg,median_time_to_10deg,success_rate\n";
  for (const auto& r : rows)
    f << fmt_double(r.foot_mass) << ',' << fmt_double(r.median_time_to_5deg) << ','
      << fmt_double(r.median_time_to_10deg) << ',' << fmt_double(r.success_rate) << '\n';
}

}  // namespace floatquad
