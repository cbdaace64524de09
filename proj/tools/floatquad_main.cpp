// Command-line front end: training, evaluation, baseline comparison, the
// integrator momentum study, the feet-weight sweep, and checkpoint
// inspection. Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "floatquad/baseline.hpp"
#include "floatquad/config.hpp"
#include "floatquad/eval.hpp"
#include "floatquad/output.hpp"
#include "floatquad/ppo.hpp"
#include "floatquad/quad_rl_env.hpp"
#include "floatquad/studies.hpp"

namespace fs = std::filesystem;
using namespace floatquad;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "run";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> steps;
  std::optional<std::string> task;
  std::optional<std::string> variant;
  std::optional<int> episodes;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "Path to a JSON run configuration");
  cmd->add_option("--out", a.out_dir, "Output directory");
  cmd->add_option("--seed", a.seed, "Master seed");
  cmd->add_option("--steps", a.steps, "Total training steps override");
  cmd->add_option("--task", a.task, "orient2d | jump2d");
  cmd->add_option("--variant", a.variant, "symmetric | asymmetric");
  cmd->add_option("--episodes", a.episodes, "Evaluation episode count");
}

RunConfig resolve_config(CommonArgs& a) {
  Task task = Task::orient2d;
  Variant variant = Variant::asymmetric;
  if (a.task) task = cfgio::task_from(*a.task);
  if (a.variant) variant = cfgio::variant_from(*a.variant);
  RunConfig cfg = RunConfig::desk_defaults(task, variant);
  if (!a.config_path.empty()) cfg = load_config_file(a.config_path, cfg);
  // Flags win over the config file.
  if (a.task) cfg.env.task = task;
  if (a.variant) cfg.env.variant = variant;
  if (a.task && !a.config_path.empty())
    cfg.env.reward_weights = RewardWeights::defaults_for(cfg.env.task);
  if (a.seed) cfg.train.seed = *a.seed;
  if (a.steps) cfg.train.total_steps = *a.steps;
  if (a.episodes) cfg.eval.episodes = *a.episodes;
  if (const char* env_out = std::getenv("FLOATQUAD_OUT"); env_out && a.out_dir == "run")
    a.out_dir = env_out;
  if (const char* env_threads = std::getenv("FLOATQUAD_THREADS"))
    cfg.train.n_threads = std::max(1, std::atoi(env_threads));
  return cfg;
}

void echo_config(const CommonArgs& a, const RunConfig& cfg) {
  fs::create_directories(a.out_dir);
  if (!a.config_path.empty())
    fs::copy_file(a.config_path, fs::path(a.out_dir) / "config-echo.json",
                  fs::copy_options::overwrite_existing);
  save_config_file((fs::path(a.out_dir) / "config-resolved.json").string(), cfg);
}

std::unique_ptr<Controller> make_controller(const std::string& ckpt_path, bool use_baseline,
                                            const RunConfig& cfg) {
  if (use_baseline)
    return std::make_unique<EllipseBaselineController>(cfg.baseline, cfg.env);
  if (ckpt_path.empty()) throw CLI::ValidationError("--ckpt is required (or use --baseline)");
  return std::make_unique<PolicyController>(load_checkpoint_file(ckpt_path));
}

int cmd_train(CommonArgs& a, const std::string& resume_path) {
  RunConfig cfg = resolve_config(a);
  echo_config(a, cfg);
  const fs::path out(a.out_dir);
  fs::create_directories(out / "checkpoints");
  MetricsWriter metrics((out / "metrics.csv").string(), (out / "metrics.jsonl").string());

  PpoTrainer trainer(
      [&](int e) {
        return std::make_unique<QuadRlEnv>(cfg.env, cfg.train.seed,
                                           static_cast<std::uint64_t>(e));
      },
      cfg.train, cfg.env.curriculum);
  if (!resume_path.empty()) {
    std::ifstream f(resume_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open resume state: " + resume_path);
    trainer.load_train_state(f);
    std::printf("resumed at update %lld (%lld steps)\n",
                static_cast<long long>(trainer.update_index()),
                static_cast<long long>(trainer.global_steps()));
  }

  const std::uint64_t hash = config_hash(cfg);
  auto save_ckpt = [&](const std::string& name) {
    Checkpoint ck;
    ck.policy = trainer.policy();
    ck.normalizer = trainer.normalizer();
    ck.has_normalizer = true;
    ck.config_hash = hash;
    save_checkpoint_file((out / "checkpoints" / name).string(), ck);
  };

  trainer.train(
      [&](const MetricsRow& r) {
        metrics.write(r);
        std::printf("update %lld  steps %lld  reward %.4f  |pitch| %.3f  eta %.2f  lr %.2e\n",
                    static_cast<long long>(r.update), static_cast<long long>(r.global_steps),
                    r.mean_episode_reward, r.mean_final_metric, r.eta, r.lr);
        std::fflush(stdout);
      },
      [&](std::int64_t update) {
        char name[64];
        std::snprintf(name, sizeof(name), "ckpt_%06lld.ckpt", static_cast<long long>(update));
        save_ckpt(name);
        std::ofstream ts(out / "train_state.bin", std::ios::binary);
        trainer.save_train_state(ts);
      });

  save_ckpt("final.ckpt");
  std::ofstream ts(out / "train_state.bin", std::ios::binary);
  trainer.save_train_state(ts);
  std::printf("done: %lld steps, %d dropped transitions, checkpoints in %s\n",
              static_cast<long long>(trainer.global_steps()), trainer.abort_events(),
              (out / "checkpoints").string().c_str());
  return 0;
}

int cmd_eval(CommonArgs& a, const std::string& ckpt_path, bool use_baseline,
             const std::string& scenario_flag) {
  RunConfig cfg = resolve_config(a);
  if (!scenario_flag.empty()) cfg.eval.scenario = scenario_flag;
  const Scenario scenario = scenario_from(cfg.eval.scenario);
  EnvConfig env_cfg = cfg.env;
  if (cfg.eval.episode_steps > 0) env_cfg.episode_steps = cfg.eval.episode_steps;
  echo_config(a, cfg);

  auto controller = make_controller(ckpt_path, use_baseline, cfg);
  const EvalReport rep =
      evaluate(*controller, env_cfg, cfg.eval.episodes, scenario, cfg.train.seed);

  const fs::path out(a.out_dir);
  fs::create_directories(out / "traces");
  for (size_t i = 0; i < rep.episodes.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "ep_%03zu.csv", i);
    write_trace_csv((out / "traces" / name).string(), rep.episodes[i]);
  }
  std::ofstream rf(out / "report.json");
  rf << report_json(rep).dump(2) << "\n";
  std::printf("scenario %s: %zu episodes, success %.2f, median t5 %.3f s, final err %.4f rad\n",
              cfg.eval.scenario.c_str(), rep.episodes.size(), rep.success_rate,
              rep.median_time_to_5deg, rep.mean_final_error);
  if (scenario == Scenario::wall_bounce)
    std::printf("mean consecutive jumps: %.2f\n", rep.mean_consecutive_jumps);
  return 0;
}

int cmd_eval_with_config(const CommonArgs& a, RunConfig cfg) {
  EllipseBaselineController ctl(cfg.baseline, cfg.env);
  const EvalReport rep = evaluate(ctl, cfg.env, cfg.eval.episodes,
                                  scenario_from(cfg.eval.scenario), cfg.train.seed);
  const fs::path out(a.out_dir);
  fs::create_directories(out / "traces");
  for (size_t i = 0; i < rep.episodes.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "ep_%03zu.csv", i);
    write_trace_csv((out / "traces" / name).string(), rep.episodes[i]);
  }
  std::ofstream rf(out / "report.json");
  rf << report_json(rep).dump(2) << "\n";
  std::printf("baseline: success %.2f, median t5 %.3f s, final err %.4f rad\n", rep.success_rate,
              rep.median_time_to_5deg, rep.mean_final_error);
  return 0;
}

int cmd_baseline(CommonArgs& a, bool tune) {
  RunConfig cfg = resolve_config(a);
  if (cfg.env.task != Task::orient2d)
    throw CLI::ValidationError("baseline: only the orient2d task has a baseline controller");
  echo_config(a, cfg);
  if (tune) {
    const std::vector<double> gains = {-16, -12, -8, -6, -4, 4, 6, 8, 12, 16};
    const double best = tune_baseline_gain(cfg.baseline, cfg.env, gains,
                                           std::min(cfg.eval.episodes, 20), cfg.train.seed);
    cfg.baseline.frequency_gain = best;
    std::printf("tuned frequency_gain = %.2f\n", best);
    save_config_file((fs::path(a.out_dir) / "config-resolved.json").string(), cfg);
  }
  return cmd_eval_with_config(a, cfg);
}


int cmd_momentum(CommonArgs& a) {
  RunConfig cfg = resolve_config(a);
  echo_config(a, cfg);
  const std::vector<double> dts = {0.01, 0.005, 0.0025, 0.00125};
  const auto rows = momentum_study(cfg.env.robot, dts, {Integrator::euler, Integrator::rk4}, 10.0);
  write_momentum_csv((fs::path(a.out_dir) / "momentum.csv").string(), rows);
  std::printf("%-6s %-9s %-14s %-14s\n", "integ", "dt", "ang drift", "lin drift");
  for (const auto& r : rows)
    std::printf("%-6s %-9g %-14.4e %-14.4e\n", r.integrator == Integrator::rk4 ? "rk4" : "euler",
                r.dt, r.max_angular_drift, r.max_linear_drift);
  return 0;
}

int cmd_sweep(CommonArgs& a, const std::string& ckpt_path) {
  RunConfig cfg = resolve_config(a);
  echo_config(a, cfg);
  auto controller = make_controller(ckpt_path, false, cfg);
  const std::vector<double> weights = {0.03, 0.23, 0.33, 0.43, 0.73};
  const int eps = a.episodes.value_or(11);
  const auto rows = feet_weight_sweep(*controller, cfg.env, weights, eps, cfg.train.seed);
  write_sweep_csv((fs::path(a.out_dir) / "sweep.csv").string(), rows);
  std::printf("%-10s %-12s %-12s %-8s\n", "foot kg", "med t5 (s)", "med t10 (s)", "success");
  for (const auto& r : rows)
    std::printf("%-10g %-12.3f %-12.3f %-8.2f\n", r.foot_mass, r.median_time_to_5deg,
                r.median_time_to_10deg, r.success_rate);
  return 0;
}

int cmd_inspect(const std::string& ckpt_path) {
  const Checkpoint ck = load_checkpoint_file(ckpt_path);
  std::printf("obs_dim: %d\nact_dim: %d\n", ck.policy.obs_dim(), ck.policy.act_dim());
  std::printf("policy parameters: %lld\nvalue parameters: %lld\n",
              static_cast<long long>(ck.policy.policy_parameter_count()),
              static_cast<long long>(ck.policy.value_parameter_count()));
  std::printf("config hash: %016llx\n", static_cast<unsigned long long>(ck.config_hash));
  std::printf("normalizer: %s", ck.has_normalizer ? "present" : "absent");
  if (ck.has_normalizer) std::printf(" (count %.1f)", ck.normalizer.count());
  std::printf("\nlog_std:");
  for (int i = 0; i < ck.policy.act_dim(); ++i) std::printf(" %.4f", ck.policy.log_std()(i));
  std::printf("\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar free-floating quadruped simulator and RL stack"};
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, base_args, mom_args, sweep_args;
  std::string resume_path, eval_ckpt, sweep_ckpt, inspect_ckpt, scenario_flag;
  bool eval_use_baseline = false, baseline_tune = false;

  auto* train = app.add_subcommand("train", "Train a policy with PPO");
  add_common(train, train_args);
  train->add_option("--resume", resume_path, "Resume from a train_state.bin");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint or the baseline");
  add_common(eval, eval_args);
  eval->add_option("--ckpt", eval_ckpt, "Policy checkpoint path");
  eval->add_flag("--baseline", eval_use_baseline, "Evaluate the handcrafted baseline");
  eval->add_option("--scenario", scenario_flag,
                   "reorient | step_targets | throw_and_jump | wall_bounce");

  auto* base = app.add_subcommand("baseline", "Run the elliptic baseline controller");
  add_common(base, base_args);
  base->add_flag("--tune", baseline_tune, "Grid-search the frequency gain first");

  auto* mom = app.add_subcommand("momentum", "Integrator momentum-drift study");
  add_common(mom, mom_args);

  auto* sweep = app.add_subcommand("sweep", "Feet-weight sweep of a trained policy");
  add_common(sweep, sweep_args);
  sweep->add_option("--ckpt", sweep_ckpt, "Policy checkpoint path")->required();

  auto* inspect = app.add_subcommand("inspect-checkpoint", "Print checkpoint metadata");
  inspect->add_option("--ckpt", inspect_ckpt, "Policy checkpoint path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) return cmd_train(train_args, resume_path);
    if (eval->parsed()) return cmd_eval(eval_args, eval_ckpt, eval_use_baseline, scenario_flag);
    if (base->parsed()) return cmd_baseline(base_args, baseline_tune);
    if (mom->parsed()) return cmd_momentum(mom_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_ckpt);
    if (inspect->parsed()) return cmd_inspect(inspect_ckpt);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return 2;
  }
  return 1;
}
