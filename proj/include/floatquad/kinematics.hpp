#pragma once

#include <optional>
#include <stdexcept>

#include "floatquad/math.hpp"
#include "floatquad/model.hpp"

namespace floatquad {

/// Physical actuator angles of the closed-chain leg.
struct ParallelAngles {
  double alpha = 0.0;  // rad
  double beta = 0.0;   // rad
};

/// Angles of the equivalent serial chain used in simulation.
struct SerialAngles {
  double shoulder = 0.0;  // rad
  double elbow = 0.0;     // rad, 0 = full extension, elbow-back branch >= 0
};

/// Elbow angle of the serial chain from the parallel actuator angles.
inline double elbow_from_parallel(const ParallelAngles& p) {
  return kPi - p.alpha - p.beta;
}

/// Map serial-chain torques (shoulder, elbow) to parallel actuator torques
/// producing the same foot force. Constant and configuration-independent.
inline Vec2 parallel_torques_from_serial(const Vec2& tau_s) {
  return {tau_s(0) - tau_s(1), tau_s(1)};
}

struct ReachabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 2-link leg kinematics in the hip frame (axes parallel to the base frame).
/// Joint angle zero points the upper link along `reference_angle`; the lower
/// link direction is upper direction plus the elbow angle.
class LegKinematics {
 public:
  LegKinematics(double l1, double l2, double reference_angle)
      : l1_(l1), l2_(l2), ref_(reference_angle) {}

  double l1() const { return l1_; }
  double l2() const { return l2_; }

  Vec2 forward(const SerialAngles& a) const {
    const double t1 = ref_ + a.shoulder;
    const double t2 = t1 + a.elbow;
    return l1_ * unit_vec(t1) + l2_ * unit_vec(t2);
  }

  /// Serial Jacobian d(foot)/d(shoulder, elbow) in the hip frame.
  Mat2 jacobian(const SerialAngles& a) const {
    const double t1 = ref_ + a.shoulder;
    const double t2 = t1 + a.elbow;
    const Vec2 d1 = l1_ * perp(unit_vec(t1));
    const Vec2 d2 = l2_ * perp(unit_vec(t2));
    Mat2 j;
    j.col(0) = d1 + d2;
    j.col(1) = d2;
    return j;
  }

  /// Parallel-coordinate Jacobian, with the beta column in the actuator
  /// torque convention of parallel_torques_from_serial: J_p = J_s * A^T,
  /// A = [[1,-1],[0,1]]. With this pairing the foot force J^-T tau is
  /// identical in both coordinate systems.
  Mat2 jacobian(const ParallelAngles& p) const {
    const SerialAngles s{p.alpha, elbow_from_parallel(p)};
    const Mat2 js = jacobian(s);
    Mat2 at;
    at << 1.0, 0.0, -1.0, 1.0;
    return js * at;
  }

  /// Foot force produced by joint torques (square planar chain): F = J^-T tau.
  Vec2 foot_force(const Mat2& jacobian, const Vec2& tau) const {
    return jacobian.transpose().inverse() * tau;
  }

  /// Elbow-back inverse kinematics. Throws ReachabilityError outside the
  /// annulus |l1 - l2| < r < l1 + l2 (with a small boundary tolerance).
  SerialAngles inverse(const Vec2& target) const {
    const double r2 = target.squaredNorm();
    const double r = std::sqrt(r2);
    const double r_min = std::abs(l1_ - l2_);
    const double r_max = l1_ + l2_;
    const double tol = 1e-12;
    if (r > r_max + tol || r < r_min - tol || r <= tol)
      throw ReachabilityError("inverse_kinematics: target outside reachable annulus");
    double c = (r2 - l1_ * l1_ - l2_ * l2_) / (2.0 * l1_ * l2_);
    c = clamp(c, -1.0, 1.0);
    const double elbow = std::acos(c);
    const double psi = std::atan2(target.y(), target.x());
    const double chi = std::atan2(l2_ * std::sin(elbow), l1_ + l2_ * std::cos(elbow));
    const double shoulder = psi - chi - ref_;
    return {wrap_angle(shoulder), elbow};
  }

 private:
  double l1_, l2_;
  double ref_;
};

inline LegKinematics leg_kinematics(const RobotModel& m) {
  return {m.upper.length, m.lower.length, m.leg_reference_angle};
}

}  // namespace floatquad
