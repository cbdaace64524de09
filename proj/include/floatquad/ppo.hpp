#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <numeric>
#include <thread>
#include <vector>

#include "floatquad/mlp.hpp"
#include "floatquad/normalizer.hpp"
#include "floatquad/policy.hpp"
#include "floatquad/rewards.hpp"
#include "floatquad/rollout.hpp"
#include "floatquad/rng.hpp"

namespace floatquad {

/// Minimal environment interface the trainer drives; the quadruped env and
/// the toy test environments both implement it.
class RlEnv {
 public:
  virtual ~RlEnv() = default;
  virtual int obs_dim() const = 0;
  virtual int act_dim() const = 0;
  virtual VecX reset(double eta) = 0;

  struct Out {
    VecX obs;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
    bool aborted = false;  // non-finite dynamics; transition must be dropped
  };
  virtual Out step(const VecX& action) = 0;

  /// Scalar reported per finished episode (the quadruped env reports the
  /// final absolute pitch error).
  virtual double episode_metric() const { return 0.0; }

  virtual void save_state(std::ostream&) const {}
  virtual void load_state(std::istream&) {}
};

struct TrainConfig {
  std::int64_t total_steps = 200'000'000;
  int steps_per_update = 100'000;
  int minibatch_size = 1'000;
  double gamma = 0.9995;
  double gae_lambda = 0.95;
  double clip_range = 0.2;
  int epochs_per_update = 4;
  double entropy_coef = 0.0;
  double value_coef = 0.5;
  double max_grad_norm = 10.0;
  double learning_rate = 3e-4;
  double lr_decay_start_fraction = 0.5;
  double lr_final_fraction = 0.1;
  int n_envs = 96;
  std::uint64_t seed = 0;
  int checkpoint_every_updates = 10;
  int n_threads = 1;

  void validate() const {
    if (total_steps <= 0 || steps_per_update <= 0 || minibatch_size <= 0 || n_envs <= 0)
      throw std::invalid_argument("TrainConfig: sizes must be positive");
    if (steps_per_update % minibatch_size != 0)
      throw std::invalid_argument("TrainConfig: steps_per_update must divide into minibatches");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("TrainConfig: gamma in (0, 1]");
  }

  std::int64_t total_updates() const {
    return (total_steps + steps_per_update - 1) / steps_per_update;
  }
};

/// Constant learning rate until lr_decay_start_fraction of training, then
/// exponential decay reaching lr_final_fraction * base at the end.
inline double lr_schedule(std::int64_t update_index, const TrainConfig& cfg) {
  const double U = static_cast<double>(cfg.total_updates());
  const double u0 = cfg.lr_decay_start_fraction * U;
  const double u = static_cast<double>(update_index);
  if (u <= u0 || U <= u0) return cfg.learning_rate;
  const double f = (u - u0) / (U - u0);
  return cfg.learning_rate * std::pow(cfg.lr_final_fraction, f);
}

struct PpoBatchStats {
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double surrogate = 0.0;  // mean of the pessimistic per-sample objective
  bool finite = true;
};

/// PPO clipped-surrogate loss and analytic gradients on one minibatch.
/// Per-sample objective is min(rho * A, clip(rho) * A); ties take the
/// unclipped branch so the gradient at rho = 1 equals the plain policy
/// gradient.
inline PpoBatchStats ppo_loss_and_grads(const GaussianPolicy& policy, const MatX& obs,
                                        const MatX& act, const VecX& logp_old, const VecX& adv,
                                        const VecX& ret, const TrainConfig& cfg,
                                        MlpNet::Grads& grads_mean, MlpNet::Grads& grads_value,
                                        VecX& grad_log_std) {
  const int n = static_cast<int>(obs.rows());
  const int d = policy.act_dim();
  const double eps = cfg.clip_range;

  MlpNet::Cache cache_mean, cache_value;
  const MatX mean = policy.mean_net().forward(obs, cache_mean);
  const MatX vout = policy.value_net().forward(obs, cache_value);

  const VecX inv_std = (-policy.log_std()).array().exp();
  const double logp_const = -0.5 * d * kLog2Pi - policy.log_std().sum();

  MatX z = (act - mean);
  z.array().rowwise() *= inv_std.transpose().array();
  const VecX logp_new = logp_const - 0.5 * z.rowwise().squaredNorm().array();

  PpoBatchStats stats;
  MatX dmean = MatX::Zero(n, d);
  grad_log_std.setZero(d);

  double surrogate_sum = 0.0, clip_count = 0.0, kl_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double rho = std::exp(logp_new(i) - logp_old(i));
    const double a = adv(i);
    const double unclipped = rho * a;
    const double clipped = clamp(rho, 1.0 - eps, 1.0 + eps) * a;
    surrogate_sum += std::min(unclipped, clipped);
    kl_sum += logp_old(i) - logp_new(i);
    if (std::abs(rho - 1.0) > eps) clip_count += 1.0;

    // d(-objective)/d(logp_new); zero when the clipped branch is active.
    const double g = (unclipped <= clipped) ? -(rho * a) / n : 0.0;
    if (g != 0.0) {
      // dlogp/dmean = (a_j - mu_j) / sigma_j^2 ; dlogp/dlogstd_j = z_j^2 - 1.
      for (int j = 0; j < d; ++j) {
        const double zij = z(i, j);
        dmean(i, j) += g * zij * inv_std(j);
        grad_log_std(j) += g * (zij * zij - 1.0);
      }
    }
  }
  stats.surrogate = surrogate_sum / n;
  stats.policy_loss = -stats.surrogate;
  stats.clip_fraction = clip_count / n;
  stats.approx_kl = kl_sum / n;
  stats.entropy = policy.entropy();

  // Value loss: value_coef * mean((V - R)^2).
  const VecX verr = vout.col(0) - ret;
  stats.value_loss = verr.squaredNorm() / n;
  MatX dvalue = (2.0 * cfg.value_coef / n) * verr;

  // Entropy bonus: loss term entropy_coef * (-H); gradient only on log_std.
  grad_log_std.array() -= cfg.entropy_coef;

  stats.loss = stats.policy_loss + cfg.value_coef * stats.value_loss -
               cfg.entropy_coef * stats.entropy;
  stats.finite = std::isfinite(stats.loss);
  if (!stats.finite) return stats;

  policy.mean_net().backward(cache_mean, dmean, grads_mean);
  policy.value_net().backward(cache_value, dvalue, grads_value);
  return stats;
}

/// Global L2 norm across all gradient blocks.
inline double global_grad_norm(const MlpNet::Grads& gm, const MlpNet::Grads& gv,
                               const VecX& gls) {
  double s = 0.0;
  for (const auto& w : gm.w) s += w.squaredNorm();
  for (const auto& b : gm.b) s += b.squaredNorm();
  for (const auto& w : gv.w) s += w.squaredNorm();
  for (const auto& b : gv.b) s += b.squaredNorm();
  s += gls.squaredNorm();
  return std::sqrt(s);
}

inline void scale_grads(MlpNet::Grads& gm, MlpNet::Grads& gv, VecX& gls, double f) {
  for (auto& w : gm.w) w *= f;
  for (auto& b : gm.b) b *= f;
  for (auto& w : gv.w) w *= f;
  for (auto& b : gv.b) b *= f;
  gls *= f;
}

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double grad_norm = 0.0;  // post-clip, last minibatch
  int skipped_minibatches = 0;
  int minibatches = 0;
};

struct MetricsRow {
  std::int64_t update = 0;
  std::int64_t global_steps = 0;
  double lr = 0.0;
  double eta = 0.0;
  std::int64_t episodes = 0;
  double mean_episode_reward = 0.0;
  double mean_episode_length = 0.0;
  double mean_final_metric = 0.0;  // |pitch error| at episode end
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double wall_time_s = 0.0;
};

using EnvFactory = std::function<std::unique_ptr<RlEnv>(int env_index)>;

namespace detail {
/// Work-stealing loop over [0, n); falls back to a plain loop for one thread.
template <typename F>
inline void parallel_for(int n, int threads, F&& f) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(threads, n);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) f(i);
    });
  for (auto& th : pool) th.join();
}

inline void write_net_raw(std::ostream& os, const MlpNet& net) {
  for (int i = 0; i < net.num_layers(); ++i) {
    Adam::write_mat(os, net.weight(i));
    Adam::write_mat(os, net.bias(i));
  }
}
inline void read_net_raw(std::istream& is, MlpNet& net) {
  for (int i = 0; i < net.num_layers(); ++i) {
    MatX w, b;
    Adam::read_mat(is, w);
    Adam::read_mat(is, b);
    net.weight(i) = w;
    net.bias(i) = b.col(0);
  }
}
}  // namespace detail

/// PPO trainer: vectorized rollout collection, GAE, clipped-surrogate Adam
/// updates, curriculum driving and learning-rate decay. Deterministic for a
/// fixed (config, seed): every stochastic draw comes from a stream derived
/// from the seed, and env stepping merges in env-index order regardless of
/// the worker count.
class PpoTrainer {
 public:
  PpoTrainer(const EnvFactory& factory, const TrainConfig& cfg,
             const CurriculumSchedule& curriculum = {})
      : cfg_(cfg), curriculum_(curriculum) {
    cfg_.validate();
    envs_.reserve(cfg_.n_envs);
    for (int e = 0; e < cfg_.n_envs; ++e) envs_.push_back(factory(e));
    obs_dim_ = envs_[0]->obs_dim();
    act_dim_ = envs_[0]->act_dim();

    Rng init_rng(cfg_.seed, 1);
    policy_ = GaussianPolicy(obs_dim_, act_dim_, init_rng);
    normalizer_ = RunningNormalizer(obs_dim_);
    shuffle_rng_ = Rng(cfg_.seed, 2);
    action_rng_.reserve(cfg_.n_envs);
    for (int e = 0; e < cfg_.n_envs; ++e)
      action_rng_.emplace_back(cfg_.seed, 1000 + static_cast<std::uint64_t>(e));

    register_adam();
    grads_mean_.init_like(policy_.mean_net());
    grads_value_.init_like(policy_.value_net());
    grad_log_std_.setZero(act_dim_);

    current_obs_.setZero(cfg_.n_envs, obs_dim_);
    ep_reward_.assign(cfg_.n_envs, 0.0);
    ep_len_.assign(cfg_.n_envs, 0);
    for (int e = 0; e < cfg_.n_envs; ++e)
      current_obs_.row(e) = envs_[e]->reset(current_eta()).transpose();
  }

  GaussianPolicy& policy() { return policy_; }
  const GaussianPolicy& policy() const { return policy_; }
  RunningNormalizer& normalizer() { return normalizer_; }
  std::int64_t global_steps() const { return global_steps_; }
  std::int64_t update_index() const { return update_index_; }
  double current_eta() const {
    return curriculum_.eta(static_cast<double>(global_steps_) /
                           static_cast<double>(cfg_.total_steps));
  }
  const TrainConfig& config() const { return cfg_; }
  int abort_events() const { return abort_events_; }

  struct EpisodeStats {
    std::int64_t episodes = 0;
    double reward_sum = 0.0;
    double length_sum = 0.0;
    double final_metric_sum = 0.0;
  };

  /// Fill the buffer by stepping all environments with sampled actions.
  EpisodeStats collect_rollouts(RolloutBuffer& buf) {
    const int T = steps_per_env();
    buf.allocate(cfg_.n_envs, T, obs_dim_, act_dim_);
    EpisodeStats stats;
    std::vector<int> pending(cfg_.n_envs, -1);

    std::vector<VecX> actions(cfg_.n_envs);
    std::vector<double> logps(cfg_.n_envs);
    std::vector<RlEnv::Out> outs(cfg_.n_envs);

    for (int t = 0; t < T; ++t) {
      normalizer_.update(current_obs_);
      const MatX x = normalizer_.normalize_batch(current_obs_);
      const MatX mean = policy_.mean_batch(x);
      const VecX value = policy_.value_batch(x);

      // Resolve deferred bootstraps from the previous step.
      for (int e = 0; e < cfg_.n_envs; ++e)
        if (pending[e] >= 0) {
          buf.next_values(pending[e]) = value(e);
          pending[e] = -1;
        }

      // Draw actions serially (fixed RNG order), step environments possibly
      // in parallel, then merge results in env-index order.
      for (int e = 0; e < cfg_.n_envs; ++e) {
        VecX a = mean.row(e).transpose();
        for (int j = 0; j < act_dim_; ++j)
          a(j) += std::exp(policy_.log_std()(j)) * action_rng_[e].normal();
        logps[e] = policy_.log_prob(mean.row(e).transpose(), a);
        actions[e] = std::move(a);
      }
      detail::parallel_for(cfg_.n_envs, cfg_.n_threads, [&](int e) {
        try {
          outs[e] = envs_[e]->step(actions[e]);
        } catch (const std::exception&) {
          outs[e].aborted = true;
        }
      });

      for (int e = 0; e < cfg_.n_envs; ++e) {
        const int row = buf.row(e, t);
        VecX xe = x.row(e).transpose();
        VecX me = mean.row(e).transpose();
        double ve = value(e);
        RlEnv::Out out = outs[e];
        if (out.aborted)
          out = retry_aborted_env(e, xe, me, ve, actions[e], logps[e]);
        buf.obs.row(row) = xe.transpose();
        buf.actions.row(row) = actions[e].transpose();
        buf.log_probs(row) = logps[e];
        buf.values(row) = ve;
        buf.rewards(row) = out.reward;
        buf.terminated[row] = out.terminated ? 1 : 0;
        buf.truncated[row] = out.truncated ? 1 : 0;
        buf.env_index[row] = e;
        buf.time_index[row] = t;
        ep_reward_[e] += out.reward;
        ep_len_[e] += 1;
        ++global_steps_;

        if (out.terminated) {
          buf.next_values(row) = 0.0;
        } else if (out.truncated) {
          const VecX xf = normalizer_.normalize(out.obs);
          buf.next_values(row) = policy_.value_batch(xf.transpose())(0);
        } else {
          pending[e] = row;
        }

        if (out.terminated || out.truncated) {
          stats.episodes += 1;
          stats.reward_sum += ep_reward_[e];
          stats.length_sum += ep_len_[e];
          stats.final_metric_sum += envs_[e]->episode_metric();
          ep_reward_[e] = 0.0;
          ep_len_[e] = 0;
          current_obs_.row(e) = envs_[e]->reset(current_eta()).transpose();
        } else {
          current_obs_.row(e) = out.obs.transpose();
        }
      }
    }
    // Trailing bootstrap for still-running episodes.
    const MatX x = normalizer_.normalize_batch(current_obs_);
    const VecX value = policy_.value_batch(x);
    for (int e = 0; e < cfg_.n_envs; ++e)
      if (pending[e] >= 0) buf.next_values(pending[e]) = value(e);
    return stats;
  }

  /// One PPO update over the buffer: normalized advantages, shuffled
  /// minibatches, gradient-norm clipping, Adam. Non-finite minibatches are
  /// skipped and counted.
  UpdateStats ppo_update(RolloutBuffer& buf, double lr) {
    const int n = buf.size();
    // Advantage normalization per update.
    const double mean = buf.advantages.mean();
    const double var = (buf.advantages.array() - mean).square().sum() / n;
    buf.advantages = (buf.advantages.array() - mean) / (std::sqrt(var) + 1e-8);

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const int mb_count = std::max(1, n / cfg_.minibatch_size);

    UpdateStats us;
    for (int epoch = 0; epoch < cfg_.epochs_per_update; ++epoch) {
      shuffle_rng_.shuffle(idx.begin(), idx.end());
      int begin = 0;
      for (int mb = 0; mb < mb_count; ++mb) {
        const int size = n / mb_count + (mb < n % mb_count ? 1 : 0);
        MatX obs(size, obs_dim_), act(size, act_dim_);
        VecX logp(size), adv(size), ret(size);
        for (int i = 0; i < size; ++i) {
          const int r = idx[begin + i];
          obs.row(i) = buf.obs.row(r);
          act.row(i) = buf.actions.row(r);
          logp(i) = buf.log_probs(r);
          adv(i) = buf.advantages(r);
          ret(i) = buf.returns(r);
        }
        begin += size;

        grads_mean_.set_zero();
        grads_value_.set_zero();
        grad_log_std_.setZero();
        const PpoBatchStats bs = ppo_loss_and_grads(policy_, obs, act, logp, adv, ret, cfg_,
                                                    grads_mean_, grads_value_, grad_log_std_);
        double gnorm = global_grad_norm(grads_mean_, grads_value_, grad_log_std_);
        if (!bs.finite || !std::isfinite(gnorm)) {
          ++us.skipped_minibatches;
          continue;
        }
        if (gnorm > cfg_.max_grad_norm)
          scale_grads(grads_mean_, grads_value_, grad_log_std_, cfg_.max_grad_norm / gnorm);
        us.grad_norm = std::min(gnorm, cfg_.max_grad_norm);
        apply_adam(lr);

        us.policy_loss += bs.policy_loss;
        us.value_loss += bs.value_loss;
        us.entropy += bs.entropy;
        us.clip_fraction += bs.clip_fraction;
        us.approx_kl += bs.approx_kl;
        ++us.minibatches;
      }
    }
    if (us.minibatches > 0) {
      us.policy_loss /= us.minibatches;
      us.value_loss /= us.minibatches;
      us.entropy /= us.minibatches;
      us.clip_fraction /= us.minibatches;
      us.approx_kl /= us.minibatches;
    }
    return us;
  }

  /// Full training loop: collect -> GAE -> update, emitting one metrics row
  /// per update and invoking the checkpoint hook periodically.
  void train(const std::function<void(const MetricsRow&)>& on_metrics,
             const std::function<void(std::int64_t)>& on_checkpoint = {}) {
    const auto t_start = std::chrono::steady_clock::now();
    RolloutBuffer buf;
    while (global_steps_ < cfg_.total_steps) {
      const EpisodeStats es = collect_rollouts(buf);
      compute_gae(buf, cfg_.gamma, cfg_.gae_lambda);
      const double lr = lr_schedule(update_index_, cfg_);
      const UpdateStats us = ppo_update(buf, lr);
      ++update_index_;

      MetricsRow row;
      row.update = update_index_;
      row.global_steps = global_steps_;
      row.lr = lr;
      row.eta = current_eta();
      row.episodes = es.episodes;
      if (es.episodes > 0) {
        row.mean_episode_reward = es.reward_sum / es.episodes;
        row.mean_episode_length = es.length_sum / es.episodes;
        row.mean_final_metric = es.final_metric_sum / es.episodes;
      }
      row.clip_fraction = us.clip_fraction;
      row.approx_kl = us.approx_kl;
      row.policy_loss = us.policy_loss;
      row.value_loss = us.value_loss;
      row.entropy = us.entropy;
      row.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
      if (on_metrics) on_metrics(row);
      if (on_checkpoint &&
          (update_index_ % cfg_.checkpoint_every_updates == 0 ||
           global_steps_ >= cfg_.total_steps))
        on_checkpoint(update_index_);
    }
  }

  int steps_per_env() const { return std::max(1, cfg_.steps_per_update / cfg_.n_envs); }

  /// Full training-state snapshot (policy, optimizer, RNG streams, env
  /// states, counters); resuming reproduces the next update bit-identically.
  void save_train_state(std::ostream& os) const {
    os.write(reinterpret_cast<const char*>(&global_steps_), sizeof(global_steps_));
    os.write(reinterpret_cast<const char*>(&update_index_), sizeof(update_index_));
    detail::write_net_raw(os, policy_.mean_net());
    detail::write_net_raw(os, policy_.value_net());
    Adam::write_mat(os, policy_.log_std());
    adam_.save(os);
    Adam::write_mat(os, normalizer_.mean());
    Adam::write_mat(os, normalizer_.m2());
    const double cnt = normalizer_.count();
    os.write(reinterpret_cast<const char*>(&cnt), sizeof(cnt));
    shuffle_rng_.save(os);
    for (const auto& r : action_rng_) r.save(os);
    Adam::write_mat(os, current_obs_);
    for (int e = 0; e < cfg_.n_envs; ++e) {
      envs_[e]->save_state(os);
      os.write(reinterpret_cast<const char*>(&ep_reward_[e]), sizeof(double));
      const std::int64_t l = ep_len_[e];
      os.write(reinterpret_cast<const char*>(&l), sizeof(l));
    }
  }

  void load_train_state(std::istream& is) {
    is.read(reinterpret_cast<char*>(&global_steps_), sizeof(global_steps_));
    is.read(reinterpret_cast<char*>(&update_index_), sizeof(update_index_));
    detail::read_net_raw(is, policy_.mean_net());
    detail::read_net_raw(is, policy_.value_net());
    MatX ls;
    Adam::read_mat(is, ls);
    policy_.log_std() = ls.col(0);
    adam_.load(is);
    MatX nm, nm2;
    Adam::read_mat(is, nm);
    Adam::read_mat(is, nm2);
    double cnt;
    is.read(reinterpret_cast<char*>(&cnt), sizeof(cnt));
    normalizer_.set_raw(nm.col(0), nm2.col(0), cnt);
    shuffle_rng_.load(is);
    for (auto& r : action_rng_) r.load(is);
    Adam::read_mat(is, current_obs_);
    for (int e = 0; e < cfg_.n_envs; ++e) {
      envs_[e]->load_state(is);
      is.read(reinterpret_cast<char*>(&ep_reward_[e]), sizeof(double));
      std::int64_t l;
      is.read(reinterpret_cast<char*>(&l), sizeof(l));
      ep_len_[e] = l;
    }
  }

 private:
  /// An aborted step drops the transition, re-resets the env, and retries the
  /// buffer slot with the fresh episode.
  RlEnv::Out retry_aborted_env(int e, VecX& x, VecX& mean, double& value, VecX& action,
                               double& logp) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      ++abort_events_;
      current_obs_.row(e) = envs_[e]->reset(current_eta()).transpose();
      ep_reward_[e] = 0.0;
      ep_len_[e] = 0;
      x = normalizer_.normalize(current_obs_.row(e).transpose());
      std::tie(mean, value) = single_forward(x);
      action = mean;
      for (int j = 0; j < act_dim_; ++j)
        action(j) += std::exp(policy_.log_std()(j)) * action_rng_[e].normal();
      logp = policy_.log_prob(mean, action);
      RlEnv::Out out = envs_[e]->step(action);
      if (!out.aborted) return out;
    }
    throw std::runtime_error("collect: repeated env aborts");
  }

  std::pair<VecX, double> single_forward(const VecX& x) const {
    VecX mean = policy_.mean_batch(x.transpose()).row(0);
    const double v = policy_.value_batch(x.transpose())(0);
    return {mean, v};
  }

  void register_adam() {
    adam_ = Adam(0.9, 0.999, 1e-5);
    auto reg_net = [&](const MlpNet& net) {
      for (int i = 0; i < net.num_layers(); ++i) {
        adam_.register_size(net.weight(i).rows(), net.weight(i).cols());
        adam_.register_size(net.bias(i).size(), 1);
      }
    };
    reg_net(policy_.mean_net());
    reg_net(policy_.value_net());
    adam_.register_size(act_dim_, 1);
  }

  void apply_adam(double lr) {
    adam_.begin_step();
    int idx = 0;
    for (int i = 0; i < policy_.mean_net().num_layers(); ++i) {
      adam_.update(idx++, policy_.mean_net().weight(i), grads_mean_.w[i], lr);
      adam_.update(idx++, policy_.mean_net().bias(i), grads_mean_.b[i], lr);
    }
    for (int i = 0; i < policy_.value_net().num_layers(); ++i) {
      adam_.update(idx++, policy_.value_net().weight(i), grads_value_.w[i], lr);
      adam_.update(idx++, policy_.value_net().bias(i), grads_value_.b[i], lr);
    }
    adam_.update(idx++, policy_.log_std(), grad_log_std_, lr);
  }

  TrainConfig cfg_;
  CurriculumSchedule curriculum_;
  std::vector<std::unique_ptr<RlEnv>> envs_;
  int obs_dim_ = 0, act_dim_ = 0;

  GaussianPolicy policy_;
  RunningNormalizer normalizer_;
  Adam adam_;
  MlpNet::Grads grads_mean_, grads_value_;
  VecX grad_log_std_;

  Rng shuffle_rng_;
  std::vector<Rng> action_rng_;
  MatX current_obs_;
  std::vector<double> ep_reward_;
  std::vector<std::int64_t> ep_len_;

  std::int64_t global_steps_ = 0;
  std::int64_t update_index_ = 0;
  int abort_events_ = 0;
};

}  // namespace floatquad
