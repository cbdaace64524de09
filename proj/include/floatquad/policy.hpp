#pragma once

#include <vector>

#include "floatquad/mlp.hpp"

namespace floatquad {

inline constexpr double kLogStdInit = -0.6931471805599453;  // log(0.5)
inline constexpr double kLog2Pi = 1.8378770664093453;

struct PolicySample {
  VecX action;
  double log_prob = 0.0;
  double value = 0.0;
  VecX mean;
};

/// Gaussian policy with a state-independent diagonal covariance, plus a
/// separate value network. Both networks are three tanh hidden layers of 128;
/// the policy head is initialized small (0.01) and log_std at log(0.5).
class GaussianPolicy {
 public:
  GaussianPolicy() = default;

  GaussianPolicy(int obs_dim, int act_dim, Rng& rng, int hidden = 128)
      : obs_dim_(obs_dim), act_dim_(act_dim) {
    mean_net_ = MlpNet({obs_dim, hidden, hidden, hidden, act_dim}, 0.01, rng);
    value_net_ = MlpNet({obs_dim, hidden, hidden, hidden, 1}, 1.0, rng);
    log_std_ = VecX::Constant(act_dim, kLogStdInit);
  }

  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return act_dim_; }
  MlpNet& mean_net() { return mean_net_; }
  MlpNet& value_net() { return value_net_; }
  const MlpNet& mean_net() const { return mean_net_; }
  const MlpNet& value_net() const { return value_net_; }
  VecX& log_std() { return log_std_; }
  const VecX& log_std() const { return log_std_; }

  /// Trainable parameters of the policy distribution (mean net + log_std);
  /// the value network is counted separately.
  std::int64_t policy_parameter_count() const {
    return mean_net_.parameter_count() + log_std_.size();
  }
  std::int64_t value_parameter_count() const { return value_net_.parameter_count(); }

  void forward(const VecX& obs, VecX& mean, double& value) const {
    mean = mean_net_.forward(obs.transpose()).row(0);
    value = value_net_.forward(obs.transpose())(0, 0);
  }

  MatX mean_batch(const MatX& obs) const { return mean_net_.forward(obs); }
  VecX value_batch(const MatX& obs) const { return value_net_.forward(obs).col(0); }

  PolicySample sample(const VecX& obs, Rng& rng) const {
    PolicySample s;
    double value;
    forward(obs, s.mean, value);
    s.value = value;
    s.action = s.mean;
    for (int i = 0; i < act_dim_; ++i)
      s.action(i) += std::exp(log_std_(i)) * rng.normal();
    s.log_prob = log_prob(s.mean, s.action);
    return s;
  }

  VecX deterministic_act(const VecX& obs) const {
    return mean_net_.forward(obs.transpose()).row(0);
  }

  /// Diagonal Gaussian log density of `action` at `mean`.
  double log_prob(const VecX& mean, const VecX& action) const {
    double lp = -0.5 * act_dim_ * kLog2Pi - log_std_.sum();
    for (int i = 0; i < act_dim_; ++i) {
      const double z = (action(i) - mean(i)) * std::exp(-log_std_(i));
      lp -= 0.5 * z * z;
    }
    return lp;
  }

  double log_prob_at(const VecX& obs, const VecX& action) const {
    return log_prob(deterministic_act(obs), action);
  }

  /// Entropy of the diagonal Gaussian: sum(log_std) + d/2 log(2 pi e).
  double entropy() const {
    return log_std_.sum() + 0.5 * act_dim_ * (kLog2Pi + 1.0);
  }

  std::pair<double, double> log_prob_and_entropy(const VecX& obs, const VecX& action) const {
    return {log_prob_at(obs, action), entropy()};
  }

 private:
  int obs_dim_ = 0;
  int act_dim_ = 0;
  MlpNet mean_net_;
  MlpNet value_net_;
  VecX log_std_;
};

}  // namespace floatquad
