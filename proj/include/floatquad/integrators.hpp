#pragma once

#include <sstream>
#include <stdexcept>

#include "floatquad/dynamics.hpp"

namespace floatquad {

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void check_finite(const GeneralizedState& s, const char* method, double dt) {
  if (s.finite()) return;
  std::ostringstream msg;
  msg << method << ": non-finite state after step dt=" << dt;
  throw IntegrationError(msg.str());
}
}  // namespace detail

/// Classical 4-stage Runge-Kutta step of (q, v). The controls closure is
/// fixed for the step and re-evaluated at each stage state:
/// controls(state, time) -> ControlInput.
template <typename Controls>
GeneralizedState step_rk4(const PlanarDynamics& dyn, const GeneralizedState& s,
                          Controls&& controls, double dt, double t0 = 0.0) {
  if (!s.finite()) throw IntegrationError("step_rk4: non-finite input state");
  const auto deriv = [&](const GeneralizedState& x, double t) {
    return dyn.forward_dynamics(x, controls(x, t));
  };

  const Vec11 a1 = deriv(s, t0);
  GeneralizedState s2;
  s2.q = s.q + 0.5 * dt * s.v;
  s2.v = s.v + 0.5 * dt * a1;
  const Vec11 a2 = deriv(s2, t0 + 0.5 * dt);
  GeneralizedState s3;
  s3.q = s.q + 0.5 * dt * s2.v;
  s3.v = s.v + 0.5 * dt * a2;
  const Vec11 a3 = deriv(s3, t0 + 0.5 * dt);
  GeneralizedState s4;
  s4.q = s.q + dt * s3.v;
  s4.v = s.v + dt * a3;
  const Vec11 a4 = deriv(s4, t0 + dt);

  GeneralizedState out;
  out.q = s.q + (dt / 6.0) * (s.v + 2.0 * s2.v + 2.0 * s3.v + s4.v);
  out.v = s.v + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  detail::check_finite(out, "step_rk4", dt);
  return out;
}

/// Explicit Euler step: state + dt * derivative.
template <typename Controls>
GeneralizedState step_euler(const PlanarDynamics& dyn, const GeneralizedState& s,
                            Controls&& controls, double dt, double t0 = 0.0) {
  if (!s.finite()) throw IntegrationError("step_euler: non-finite input state");
  const Vec11 a = dyn.forward_dynamics(s, controls(s, t0));
  GeneralizedState out;
  out.q = s.q + dt * s.v;
  out.v = s.v + dt * a;
  detail::check_finite(out, "step_euler", dt);
  return out;
}

}  // namespace floatquad
