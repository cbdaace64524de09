#pragma once

#include <cstdint>
#include <vector>

#include "floatquad/math.hpp"

namespace floatquad {

/// On-policy transitions collected from n_envs environments, env-major:
/// row index = env * steps_per_env + t. next_value already resolves the
/// bootstrap: 0 for termination, V(final obs) for truncation, V(s_{t+1})
/// otherwise.
struct RolloutBuffer {
  int n_envs = 0;
  int steps_per_env = 0;

  MatX obs;      // (n, obs_dim) policy inputs
  MatX actions;  // (n, act_dim)
  VecX log_probs;
  VecX values;
  VecX rewards;
  VecX next_values;
  std::vector<std::uint8_t> terminated;
  std::vector<std::uint8_t> truncated;
  std::vector<std::int32_t> env_index;
  std::vector<std::int32_t> time_index;

  VecX advantages;
  VecX returns;

  int size() const { return n_envs * steps_per_env; }

  void allocate(int envs, int steps, int obs_dim, int act_dim) {
    n_envs = envs;
    steps_per_env = steps;
    const int n = size();
    obs.setZero(n, obs_dim);
    actions.setZero(n, act_dim);
    log_probs.setZero(n);
    values.setZero(n);
    rewards.setZero(n);
    next_values.setZero(n);
    terminated.assign(n, 0);
    truncated.assign(n, 0);
    env_index.assign(n, 0);
    time_index.assign(n, 0);
    advantages.setZero(n);
    returns.setZero(n);
  }

  int row(int env, int t) const { return env * steps_per_env + t; }
};

/// Generalized advantage estimation:
///   delta_t = r_t + gamma * next_value_t - V_t
///   A_t     = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
/// done cuts the recursion at both termination and truncation; returns are
/// advantages plus values.
inline void compute_gae(RolloutBuffer& buf, double gamma, double lambda) {
  for (int e = 0; e < buf.n_envs; ++e) {
    double carry = 0.0;
    for (int t = buf.steps_per_env - 1; t >= 0; --t) {
      const int i = buf.row(e, t);
      const double delta = buf.rewards(i) + gamma * buf.next_values(i) - buf.values(i);
      const bool done = buf.terminated[i] || buf.truncated[i];
      carry = delta + gamma * lambda * (done ? 0.0 : carry);
      buf.advantages(i) = carry;
    }
  }
  buf.returns = buf.advantages + buf.values;
}

}  // namespace floatquad
