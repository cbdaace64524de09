#pragma once

#include "floatquad/env.hpp"
#include "floatquad/ppo.hpp"

namespace floatquad {

/// Adapter exposing QuadEnv through the trainer's environment interface.
class QuadRlEnv : public RlEnv {
 public:
  QuadRlEnv(const EnvConfig& cfg, std::uint64_t seed, std::uint64_t stream)
      : env_(cfg, seed, stream) {}

  int obs_dim() const override { return env_.obs_dim(); }
  int act_dim() const override { return env_.action_dim(); }

  VecX reset(double eta) override { return env_.reset(eta).values; }

  Out step(const VecX& action) override {
    const StepResult r = env_.step(action);
    last_metric_ = std::abs(r.info.pitch_error);
    Out out;
    out.obs = r.obs.values;
    out.reward = r.reward;
    out.aborted = r.info.aborted;
    out.terminated = r.terminated && !r.info.aborted;
    out.truncated = r.truncated;
    return out;
  }

  double episode_metric() const override { return last_metric_; }

  void save_state(std::ostream& os) const override {
    env_.save_state(os);
    os.write(reinterpret_cast<const char*>(&last_metric_), sizeof(last_metric_));
  }
  void load_state(std::istream& is) override {
    env_.load_state(is);
    is.read(reinterpret_cast<char*>(&last_metric_), sizeof(last_metric_));
  }

  QuadEnv& env() { return env_; }
  const QuadEnv& env() const { return env_; }

 private:
  QuadEnv env_;
  double last_metric_ = 0.0;
};

}  // namespace floatquad
