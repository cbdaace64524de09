// Runs the handcrafted elliptic baseline on a 90-degree reorientation and
// prints the pitch trajectory, showing the free-floating attitude dynamics.

#include <cstdio>

#include "floatquad/baseline.hpp"
#include "floatquad/config.hpp"
#include "floatquad/env.hpp"

int main() {
  using namespace floatquad;
  RunConfig cfg = RunConfig::desk_defaults(Task::orient2d, Variant::asymmetric);
  QuadEnv env(cfg.env, 1, 0);
  ResetOverrides ov;
  ov.pitch = kPi / 2.0;
  Observation obs = env.reset(1.0, ov);

  EllipseBaselineController ctl(cfg.baseline, cfg.env);
  ctl.reset();
  for (int t = 0; t < cfg.env.episode_steps; ++t) {
    const StepResult res = env.step(ctl.act(obs));
    if (t % 50 == 0)
      std::printf("t=%5.2f s  pitch error %+8.4f rad  reward %+.5f\n", (t + 1) * 0.01,
                  res.info.pitch_error, res.reward);
    if (res.terminated || res.truncated) break;
    obs = res.obs;
  }
  return 0;
}
