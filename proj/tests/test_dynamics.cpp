#include <catch2/catch_amalgamated.hpp>

#include <limits>

#include "floatquad/actuation.hpp"
#include "floatquad/dynamics.hpp"
#include "floatquad/integrators.hpp"
#include "floatquad/kinematics.hpp"
#include "floatquad/rng.hpp"
#include "floatquad/studies.hpp"

using namespace floatquad;
using Catch::Approx;

namespace {

RobotModel tiny_leg_model() {
  RobotModel m;
  m.upper.mass = 1e-9;
  m.upper.inertia_about_com = 1e-12;
  m.lower.mass = 1e-9;
  m.lower.inertia_about_com = 1e-12;
  m.lower.attached_point_mass = 0.0;
  return m;
}

GeneralizedState nominal_state(const RobotModel& m, double base_z = 2.0) {
  GeneralizedState s;
  s.q(1) = base_z;
  const SerialAngles a = leg_kinematics(m).inverse(m.nominal_foot_offset);
  for (int k = 0; k < kNumLegs; ++k) {
    s.q(3 + 2 * k) = a.shoulder;
    s.q(4 + 2 * k) = a.elbow;
  }
  return s;
}

ControlInput no_controls(const GeneralizedState&, double) { return {}; }

}  // namespace

TEST_CASE("free fall of the base") {
  RobotModel m = tiny_leg_model();
  m.gravity = Vec2(0.0, -9.81);
  PlanarDynamics dyn(m);
  const GeneralizedState s = nominal_state(m);
  const Vec11 acc = dyn.forward_dynamics(s, ControlInput{});
  CHECK(acc(0) == Approx(0.0).margin(1e-9));
  CHECK(acc(1) == Approx(-9.81).epsilon(1e-12));
  CHECK(acc(2) == Approx(0.0).margin(1e-9));
}

TEST_CASE("internal torques leave the COM momentum unchanged") {
  RobotModel m;
  m.gravity = Vec2::Zero();
  PlanarDynamics dyn(m);
  GeneralizedState s = nominal_state(m);
  Rng rng(7);
  for (int i = 0; i < kDof; ++i) s.v(i) = rng.uniform(-0.5, 0.5);

  const auto controls = [&](const GeneralizedState&, double) {
    ControlInput u;
    for (int j = 0; j < kNumJoints; ++j) u.torques(j) = 5.0 * std::sin(j + 1.0);
    return u;
  };
  const auto p0 = dyn.total_momentum(s);
  const double h = 1e-5;
  const GeneralizedState s1 = step_rk4(dyn, s, controls, h);
  const auto p1 = dyn.total_momentum(s1);
  // dP/dt and dL/dt vanish under purely internal torques.
  CHECK((p1.linear - p0.linear).norm() / h < 1e-9);
  CHECK(std::abs(p1.angular_about_com - p0.angular_about_com) / h < 1e-9);
}

TEST_CASE("locked-leg pendulum frequency matches the analytic value") {
  // A nearly fixed base (huge mass, held against gravity by an external
  // counter-force) with one massive upper link swinging as a pendulum; the
  // other links carry negligible mass. Without the counter-force the whole
  // system free-falls and nothing oscillates.
  RobotModel m = tiny_leg_model();
  m.base.mass = 1e9;
  m.base.inertia_about_com = 1e9;
  m.gravity = Vec2(0.0, -9.81);
  m.upper.mass = 0.3;
  m.upper.inertia_about_com = 0.0015625;
  PlanarDynamics dyn(m);

  const auto hold_base = [&](const GeneralizedState& x, double) {
    ControlInput u;
    u.add_force(ExternalForce{0, Vec2(x.q(0), x.q(1)), -m.base.mass * m.gravity, 0.0});
    return u;
  };

  GeneralizedState s;
  s.q(1) = 2.0;
  const double amp = 0.02;
  s.q(3) = amp;  // leg 0 shoulder; reference angle points straight down
  for (int k = 1; k < kNumLegs; ++k) s.q(3 + 2 * k) = 0.0;

  const double m_l = m.upper.mass;
  const double l_com = m.upper.com_offset.x();
  const double i_pivot = m.upper.inertia_about_com + m_l * l_com * l_com;
  const double omega_expected = std::sqrt(m_l * 9.81 * l_com / i_pivot);

  // Count zero crossings of the shoulder angle over many periods.
  const double dt = 5e-4;
  double t = 0.0, first_cross = -1.0, last_cross = -1.0;
  int crossings = 0;
  double prev = s.q(3);
  for (int i = 0; i < 80000; ++i) {
    s = step_rk4(dyn, s, hold_base, dt, t);
    t += dt;
    const double cur = s.q(3);
    if (prev > 0.0 && cur <= 0.0) {
      const double tc = t - dt * cur / (cur - prev);
      if (first_cross < 0.0)
        first_cross = tc;
      else
        last_cross = tc;
      ++crossings;
    }
    prev = cur;
  }
  REQUIRE(crossings >= 10);
  const double period = (last_cross - first_cross) / (crossings - 1);
  const double omega_measured = kTwoPi / period;
  CHECK(omega_measured == Approx(omega_expected).epsilon(0.005));
}

TEST_CASE("ballistic base follows the closed-form parabola") {
  RobotModel m;
  m.gravity = Vec2(0.0, -9.81);
  PlanarDynamics dyn(m);
  GeneralizedState s = nominal_state(m, 5.0);
  s.v(0) = 0.4;
  s.v(1) = 1.3;
  const double z0 = s.q(1), vz0 = s.v(1), x0 = s.q(0), vx0 = s.v(0);
  const double dt = 0.0025;
  double t = 0.0;
  for (int i = 0; i < 400; ++i) {
    s = step_rk4(dyn, s, no_controls, dt, t);
    t += dt;
  }
  CHECK(s.q(1) == Approx(z0 + vz0 * t - 0.5 * 9.81 * t * t).margin(1e-8));
  CHECK(s.q(0) == Approx(x0 + vx0 * t).margin(1e-8));
}

TEST_CASE("COM follows the ballistic parabola under internal torques") {
  RobotModel m;
  m.gravity = Vec2(0.0, -1.62);
  PlanarDynamics dyn(m);
  const FreeFloatScenario sc(m);
  GeneralizedState s = nominal_state(m, 10.0);
  const auto controls = [&](const GeneralizedState& x, double t) { return sc.controls(x, t); };

  const Vec2 com0 = dyn.com_position(dyn.body_kinematics(s));
  const Vec2 vcom0 = dyn.com_velocity(s);
  const double dt = 0.0025;
  double t = 0.0;
  double worst = 0.0;
  for (int i = 0; i < 1200; ++i) {
    s = step_rk4(dyn, s, controls, dt, t);
    t += dt;
    const Vec2 com = dyn.com_position(dyn.body_kinematics(s));
    const Vec2 expected = com0 + vcom0 * t + 0.5 * t * t * Vec2(0.0, -1.62);
    worst = std::max(worst, (com - expected).norm());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("momentum conservation in free float (RK4) and Euler divergence") {
  RobotModel m;
  const auto rows = momentum_study(m, {0.0025}, {Integrator::rk4, Integrator::euler}, 10.0);
  REQUIRE(rows.size() == 2);
  const auto& rk4 = rows[0];
  const auto& euler = rows[1];
  const double tol = 1e-6 * rk4.tolerance_scale;
  CHECK(rk4.max_angular_drift < tol);
  CHECK(rk4.max_linear_drift < tol);
  CHECK(euler.max_angular_drift >= 100.0 * rk4.max_angular_drift);
}

TEST_CASE("Euler step is state plus dt times the derivative") {
  RobotModel m;
  m.gravity = Vec2(0.3, -2.0);
  PlanarDynamics dyn(m);
  GeneralizedState s = nominal_state(m);
  Rng rng(8);
  for (int i = 0; i < kDof; ++i) s.v(i) = rng.uniform(-1, 1);
  ControlInput u;
  for (int j = 0; j < kNumJoints; ++j) u.torques(j) = rng.uniform(-5, 5);
  const auto controls = [&](const GeneralizedState&, double) { return u; };
  const double dt = 0.01;
  const GeneralizedState out = step_euler(dyn, s, controls, dt);
  const Vec11 acc = dyn.forward_dynamics(s, u);
  CHECK((out.q - (s.q + dt * s.v)).norm() == 0.0);
  CHECK((out.v - (s.v + dt * acc)).norm() == 0.0);
}

TEST_CASE("constant velocity drift without forces is exact under Euler") {
  RobotModel m;
  m.gravity = Vec2::Zero();
  PlanarDynamics dyn(m);
  GeneralizedState s = nominal_state(m);
  s.v(0) = 0.7;
  s.v(1) = -0.2;
  GeneralizedState cur = s;
  for (int i = 0; i < 100; ++i) cur = step_euler(dyn, cur, no_controls, 0.01);
  CHECK(cur.q(0) == Approx(s.q(0) + 0.7 * 1.0).epsilon(1e-13));
  CHECK(cur.q(1) == Approx(s.q(1) - 0.2 * 1.0).epsilon(1e-13));
}

TEST_CASE("one RK4 step agrees with a fine-step Euler reference") {
  RobotModel m;
  m.gravity = Vec2::Zero();
  PlanarDynamics dyn(m);
  GeneralizedState s = nominal_state(m);
  Rng rng(9);
  for (int i = 0; i < kDof; ++i) s.v(i) = rng.uniform(-1, 1);
  ControlInput u;
  for (int j = 0; j < kNumJoints; ++j) u.torques(j) = rng.uniform(-8, 8);
  const auto controls = [&](const GeneralizedState&, double) { return u; };

  const double dt = 0.0025;
  const GeneralizedState rk = step_rk4(dyn, s, controls, dt);
  GeneralizedState ref = s;
  const int n = 10000;
  for (int i = 0; i < n; ++i) ref = step_euler(dyn, ref, controls, dt / n);
  CHECK((rk.q - ref.q).norm() < 1e-6);
  CHECK((rk.v - ref.v).norm() < 1e-6);
}

TEST_CASE("RK4 global error scales as dt^4") {
  // Smooth closed-loop field (PD without the envelope kinks) so the formal
  // order is observable.
  RobotModel m;
  m.gravity = Vec2::Zero();
  PlanarDynamics dyn(m);
  const GeneralizedState s0 = nominal_state(m);
  const JointVec q_nom = s0.q.segment<kNumJoints>(kBaseDof);
  const auto controls = [&](const GeneralizedState& x, double t) {
    ControlInput u;
    JointVec q_star = q_nom;
    for (int j = 0; j < kNumJoints; ++j) q_star(j) += 0.3 * std::sin(4.0 * t + j);
    u.torques = pd_torques(q_star, x.q.segment<kNumJoints>(kBaseDof),
                           x.v.segment<kNumJoints>(kBaseDof), m.gains);
    return u;
  };
  const double horizon = 0.64;

  const auto run = [&](double dt) {
    GeneralizedState s = s0;
    const int n = static_cast<int>(horizon / dt + 0.5);
    double t = 0.0;
    for (int i = 0; i < n; ++i) {
      s = step_rk4(dyn, s, controls, dt, t);
      t += dt;
    }
    return s;
  };
  const GeneralizedState ref = run(0.0001);
  const auto err = [&](double dt) {
    const GeneralizedState s = run(dt);
    return std::sqrt((s.q - ref.q).squaredNorm() + (s.v - ref.v).squaredNorm());
  };
  const double e1 = err(0.008);
  const double e2 = err(0.004);
  const double e3 = err(0.002);
  const double r1 = e1 / e2;
  const double r2 = e2 / e3;
  CHECK(r1 > 16.0 * 0.7);
  CHECK(r1 < 16.0 * 1.3);
  CHECK(r2 > 16.0 * 0.7);
  CHECK(r2 < 16.0 * 1.3);
}

TEST_CASE("mechanical energy is conserved in torque-free float") {
  RobotModel m;
  m.gravity = Vec2::Zero();
  PlanarDynamics dyn(m);
  GeneralizedState s = nominal_state(m);
  s.v(2) = 0.3;
  for (int j = 0; j < kNumJoints; ++j) s.v(3 + j) = 0.4 * std::sin(j + 1.0);
  const double e0 = dyn.kinetic_energy(s) + dyn.potential_energy(s);
  double worst = 0.0;
  double t = 0.0;
  const double dt = 0.0025;
  for (int i = 0; i < 4000; ++i) {
    s = step_rk4(dyn, s, no_controls, dt, t);
    t += dt;
    const double e = dyn.kinetic_energy(s) + dyn.potential_energy(s);
    worst = std::max(worst, std::abs(e - e0));
  }
  CHECK(worst / std::abs(e0) < 1e-8);
}

TEST_CASE("total momentum basics") {
  RobotModel m;
  PlanarDynamics dyn(m);
  GeneralizedState s = nominal_state(m);

  SECTION("zero velocities give zero momentum") {
    const auto p = dyn.total_momentum(s);
    CHECK(p.linear.norm() == 0.0);
    CHECK(p.angular_about_com == 0.0);
  }
  SECTION("rigid translation carries M v and no angular momentum") {
    s.v(0) = 0.8;
    s.v(1) = -0.3;
    const auto p = dyn.total_momentum(s);
    const Vec2 expected = dyn.total_mass() * Vec2(0.8, -0.3);
    CHECK((p.linear - expected).norm() < 1e-12);
    CHECK(std::abs(p.angular_about_com) < 1e-12);
  }
}

TEST_CASE("angular momentum is constant along a torque-free trajectory") {
  RobotModel m;
  m.gravity = Vec2::Zero();
  PlanarDynamics dyn(m);
  GeneralizedState s = nominal_state(m);
  Rng rng(10);
  for (int i = 0; i < kDof; ++i) s.v(i) = rng.uniform(-0.4, 0.4);
  const auto p0 = dyn.total_momentum(s);
  const double h = 1e-4;
  GeneralizedState a = step_rk4(dyn, s, no_controls, h);
  GeneralizedState b = step_rk4(dyn, a, no_controls, h);
  const auto pa = dyn.total_momentum(a);
  const auto pb = dyn.total_momentum(b);
  CHECK(std::abs((pb.angular_about_com - p0.angular_about_com) / (2 * h)) < 1e-9);
  CHECK(std::abs(pa.angular_about_com - p0.angular_about_com) < 1e-9);
}

TEST_CASE("invalid models are rejected and blow-ups are reported") {
  RobotModel bad;
  bad.upper.mass = -1.0;
  CHECK_THROWS_AS(PlanarDynamics(bad), std::invalid_argument);

  RobotModel m;
  PlanarDynamics dyn(m);
  GeneralizedState s = nominal_state(m);
  s.v(0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(step_rk4(dyn, s, no_controls, 0.0025), IntegrationError);
}

TEST_CASE("external point forces accelerate the system") {
  RobotModel m;
  m.gravity = Vec2::Zero();
  PlanarDynamics dyn(m);
  const GeneralizedState s = nominal_state(m);
  const BodyKinematics bk = dyn.body_kinematics(s);
  ControlInput u;
  u.add_force(ExternalForce{2, bk.leg[0].foot, Vec2(0.0, 10.0), 0.0});
  const Vec11 acc = dyn.forward_dynamics(s, u);
  // Linear momentum rate equals the applied force.
  const double h = 1e-6;
  GeneralizedState s2 = s;
  s2.v += h * acc;
  const auto p0 = dyn.total_momentum(s);
  const auto p1 = dyn.total_momentum(s2);
  const Vec2 rate = (p1.linear - p0.linear) / h;
  CHECK(rate.x() == Approx(0.0).margin(1e-6));
  CHECK(rate.y() == Approx(10.0).epsilon(1e-6));
}
