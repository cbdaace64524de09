#pragma once

#include <array>
#include <stdexcept>

#include "floatquad/kinematics.hpp"
#include "floatquad/math.hpp"
#include "floatquad/model.hpp"

namespace floatquad {

using Vec11 = Eigen::Matrix<double, kDof, 1>;

/// Generalized coordinates of the floating-base system:
/// q = (base x, base z, base pitch, 8 joint angles), v = d/dt q.
/// Joint angles are stored unwrapped; wrapping happens at the observation layer.
struct GeneralizedState {
  Vec11 q = Vec11::Zero();
  Vec11 v = Vec11::Zero();

  bool finite() const { return q.allFinite() && v.allFinite(); }
};

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Point force (plus optional pure torque) applied to one body.
/// Body ids: 0 = base, 1 + 2k = upper link of leg k, 2 + 2k = lower link.
struct ExternalForce {
  int body = 0;
  Vec2 point = Vec2::Zero();  // world
  Vec2 force = Vec2::Zero();  // world
  double torque = 0.0;        // pure torque about z
};

inline constexpr int kMaxExternalForces = 12;

/// Control input for one dynamics evaluation: joint torques plus a bounded
/// list of external point forces (contacts).
struct ControlInput {
  JointVec torques = JointVec::Zero();
  std::array<ExternalForce, kMaxExternalForces> forces{};
  int force_count = 0;

  void add_force(const ExternalForce& f) {
    if (force_count >= kMaxExternalForces) throw std::runtime_error("ControlInput: too many forces");
    forces[force_count++] = f;
  }
  void clear() {
    torques.setZero();
    force_count = 0;
  }
};

/// World-frame kinematics of every body for one state; shared by dynamics,
/// contacts, collision checks, and observation assembly.
struct BodyKinematics {
  Vec2 base_pos;
  double pitch;
  struct Leg {
    Vec2 hip, elbow, foot;      // chain points
    Vec2 upper_com, lower_com;  // world COM (lower includes folded foot mass)
    Vec2 u1, u2;                // link direction unit vectors
    double th1, th2;            // absolute link angles
    double th1_dot, th2_dot;
    Vec2 hip_vel, foot_vel;
    Vec2 upper_com_vel, lower_com_vel;
  };
  std::array<Leg, kNumLegs> leg;
};

/// Planar articulated rigid-body dynamics for the quadruped model. The foot
/// point mass is folded into the lower link's mass/COM/inertia, so the system
/// is nine rigid bodies with an 11x11 arrow-structured mass matrix (3x3 base
/// block, per-leg 2x2 diagonal blocks) solved by a Schur complement on the
/// base.
class PlanarDynamics {
 public:
  explicit PlanarDynamics(const RobotModel& model) : model_(model) {
    model_.validate();
    for (int k = 0; k < kNumLegs; ++k) foot_mass_[k] = model_.lower.attached_point_mass;
    refold();
  }

  const RobotModel& model() const { return model_; }

  /// Per-episode randomization hooks.
  void set_foot_mass(double m) {
    for (int k = 0; k < kNumLegs; ++k) foot_mass_[k] = m;
    refold();
  }
  void set_foot_mass(int leg, double m) {
    foot_mass_[leg] = m;
    refold();
  }
  double foot_mass(int leg) const { return foot_mass_[leg]; }
  void set_base_mass(double m) {
    model_.base.mass = m;
  }
  void set_gravity(const Vec2& g) { model_.gravity = g; }

  double total_mass() const {
    double m = model_.base.mass;
    for (int k = 0; k < kNumLegs; ++k) m += model_.upper.mass + model_.lower.mass + foot_mass_[k];
    return m;
  }

  BodyKinematics body_kinematics(const GeneralizedState& s) const {
    BodyKinematics bk;
    bk.base_pos = {s.q(0), s.q(1)};
    bk.pitch = s.q(2);
    const Vec2 vb{s.v(0), s.v(1)};
    const double wb = s.v(2);
    const Mat2 rot = rotation(bk.pitch);
    const double cu = model_.upper.com_offset.x();
    const double l1 = model_.upper.length;
    const double l2 = model_.lower.length;
    for (int k = 0; k < kNumLegs; ++k) {
      auto& L = bk.leg[k];
      const Vec2 hip_off = rot * model_.hip_offsets[k];
      L.hip = bk.base_pos + hip_off;
      L.hip_vel = vb + wb * perp(hip_off);
      L.th1 = bk.pitch + model_.leg_reference_angle + s.q(3 + 2 * k);
      L.th2 = L.th1 + s.q(4 + 2 * k);
      L.th1_dot = wb + s.v(3 + 2 * k);
      L.th2_dot = L.th1_dot + s.v(4 + 2 * k);
      L.u1 = unit_vec(L.th1);
      L.u2 = unit_vec(L.th2);
      L.elbow = L.hip + l1 * L.u1;
      L.foot = L.elbow + l2 * L.u2;
      L.upper_com = L.hip + cu * L.u1;
      L.lower_com = L.elbow + lower_com_dist_[k] * L.u2;
      const Vec2 elbow_vel = L.hip_vel + L.th1_dot * l1 * perp(L.u1);
      L.foot_vel = elbow_vel + L.th2_dot * l2 * perp(L.u2);
      L.upper_com_vel = L.hip_vel + L.th1_dot * cu * perp(L.u1);
      L.lower_com_vel = elbow_vel + L.th2_dot * lower_com_dist_[k] * perp(L.u2);
    }
    return bk;
  }

  /// Accelerations solving M(q) qdd = Q(q, v, u).
  Vec11 forward_dynamics(const GeneralizedState& s, const ControlInput& u) const {
    const BodyKinematics bk = body_kinematics(s);
    return forward_dynamics(s, u, bk);
  }

  Vec11 forward_dynamics(const GeneralizedState& s, const ControlInput& u,
                         const BodyKinematics& bk) const {
    Mat3 A = Mat3::Zero();
    std::array<Eigen::Matrix<double, 3, 2>, kNumLegs> B;
    std::array<Mat2, kNumLegs> D;
    Vec11 rhs = Vec11::Zero();

    const Vec2 g = model_.gravity;
    const double wb = s.v(2);
    const double wb2 = wb * wb;

    // Base body: COM at base origin.
    A(0, 0) += model_.base.mass;
    A(1, 1) += model_.base.mass;
    A(2, 2) += model_.base.inertia_about_com;
    rhs(0) += model_.base.mass * g.x();
    rhs(1) += model_.base.mass * g.y();

    for (int k = 0; k < kNumLegs; ++k) {
      const auto& L = bk.leg[k];
      B[k].setZero();
      D[k].setZero();
      const Vec2 hip_rel = L.hip - bk.base_pos;
      const Vec2 centripetal_hip = -wb2 * hip_rel;

      // Upper link: columns (x, z, phi, shoulder); angular weights (0,0,1,1).
      {
        const double m = model_.upper.mass;
        const double inertia = model_.upper.inertia_about_com;
        const Vec2 jphi = perp(L.upper_com - bk.base_pos);
        const Vec2 jsh = perp(L.upper_com - L.hip);
        accumulate_body(A, B[k], D[k], m, inertia, jphi, jsh, Vec2::Zero(), true, false);
        const Vec2 a0 = centripetal_hip - L.th1_dot * L.th1_dot * (L.upper_com - L.hip);
        const Vec2 f = m * (g - a0);
        rhs(0) += f.x();
        rhs(1) += f.y();
        rhs(2) += jphi.dot(f);
        rhs(3 + 2 * k) += jsh.dot(f);
      }
      // Lower link with folded foot mass: columns (x, z, phi, shoulder, elbow).
      {
        const double m = lower_mass_[k];
        const double inertia = lower_inertia_[k];
        const Vec2 jphi = perp(L.lower_com - bk.base_pos);
        const Vec2 jsh = perp(L.lower_com - L.hip);
        const Vec2 jel = perp(L.lower_com - L.elbow);
        accumulate_body(A, B[k], D[k], m, inertia, jphi, jsh, jel, true, true);
        const Vec2 a0 = centripetal_hip - L.th1_dot * L.th1_dot * (L.elbow - L.hip) -
                        L.th2_dot * L.th2_dot * (L.lower_com - L.elbow);
        const Vec2 f = m * (g - a0);
        rhs(0) += f.x();
        rhs(1) += f.y();
        rhs(2) += jphi.dot(f);
        rhs(3 + 2 * k) += jsh.dot(f);
        rhs(4 + 2 * k) += jel.dot(f);
      }
      rhs(3 + 2 * k) += u.torques(2 * k);
      rhs(4 + 2 * k) += u.torques(2 * k + 1);
    }

    // External point forces / torques.
    for (int i = 0; i < u.force_count; ++i) {
      const auto& ef = u.forces[i];
      rhs(0) += ef.force.x();
      rhs(1) += ef.force.y();
      rhs(2) += perp(ef.point - bk.base_pos).dot(ef.force) + ef.torque;
      if (ef.body > 0) {
        const int k = (ef.body - 1) / 2;
        const bool lower = ((ef.body - 1) % 2) == 1;
        const auto& L = bk.leg[k];
        rhs(3 + 2 * k) += perp(ef.point - L.hip).dot(ef.force) + ef.torque;
        if (lower) rhs(4 + 2 * k) += perp(ef.point - L.elbow).dot(ef.force) + ef.torque;
      }
    }

    // Schur complement on the base block.
    Mat3 S = A;
    Vec3 rb{rhs(0), rhs(1), rhs(2)};
    std::array<Mat2, kNumLegs> Dinv;
    for (int k = 0; k < kNumLegs; ++k) {
      const Mat2& d = D[k];
      const double det = d(0, 0) * d(1, 1) - d(0, 1) * d(1, 0);
      if (!(std::abs(det) > 0.0) || !std::isfinite(det))
        throw ModelError("forward_dynamics: singular leg inertia block");
      Mat2 inv;
      inv << d(1, 1), -d(0, 1), -d(1, 0), d(0, 0);
      inv /= det;
      Dinv[k] = inv;
      const Vec2 rk{rhs(3 + 2 * k), rhs(4 + 2 * k)};
      S -= B[k] * inv * B[k].transpose();
      rb -= B[k] * (inv * rk);
    }
    const double sdet = S.determinant();
    if (!(std::abs(sdet) > 0.0) || !std::isfinite(sdet))
      throw ModelError("forward_dynamics: singular mass matrix");
    const Vec3 ab = S.inverse() * rb;

    Vec11 acc;
    acc.segment<3>(0) = ab;
    for (int k = 0; k < kNumLegs; ++k) {
      const Vec2 rk{rhs(3 + 2 * k), rhs(4 + 2 * k)};
      const Vec2 ak = Dinv[k] * (rk - B[k].transpose() * ab);
      acc(3 + 2 * k) = ak.x();
      acc(4 + 2 * k) = ak.y();
    }
    return acc;
  }

  struct Momentum {
    Vec2 linear = Vec2::Zero();
    double angular_about_com = 0.0;
  };

  /// Total momentum, angular part taken about the instantaneous system COM.
  Momentum total_momentum(const GeneralizedState& s) const {
    const BodyKinematics bk = body_kinematics(s);
    return total_momentum(s, bk);
  }

  Momentum total_momentum(const GeneralizedState& s, const BodyKinematics& bk) const {
    Momentum mom;
    const Vec2 com = com_position(bk);
    const Vec2 vb{s.v(0), s.v(1)};
    mom.linear = model_.base.mass * vb;
    mom.angular_about_com = model_.base.inertia_about_com * s.v(2) +
                            model_.base.mass * cross2(bk.base_pos - com, vb);
    for (int k = 0; k < kNumLegs; ++k) {
      const auto& L = bk.leg[k];
      mom.linear += model_.upper.mass * L.upper_com_vel + lower_mass_[k] * L.lower_com_vel;
      mom.angular_about_com += model_.upper.inertia_about_com * L.th1_dot +
                               model_.upper.mass * cross2(L.upper_com - com, L.upper_com_vel);
      mom.angular_about_com += lower_inertia_[k] * L.th2_dot +
                               lower_mass_[k] * cross2(L.lower_com - com, L.lower_com_vel);
    }
    return mom;
  }

  Vec2 com_position(const BodyKinematics& bk) const {
    Vec2 p = model_.base.mass * bk.base_pos;
    for (int k = 0; k < kNumLegs; ++k)
      p += model_.upper.mass * bk.leg[k].upper_com + lower_mass_[k] * bk.leg[k].lower_com;
    return p / total_mass();
  }

  Vec2 com_velocity(const GeneralizedState& s) const {
    const BodyKinematics bk = body_kinematics(s);
    Vec2 p{s.v(0) * model_.base.mass, s.v(1) * model_.base.mass};
    for (int k = 0; k < kNumLegs; ++k)
      p += model_.upper.mass * bk.leg[k].upper_com_vel + lower_mass_[k] * bk.leg[k].lower_com_vel;
    return p / total_mass();
  }

  double kinetic_energy(const GeneralizedState& s) const {
    const BodyKinematics bk = body_kinematics(s);
    const Vec2 vb{s.v(0), s.v(1)};
    double e = 0.5 * model_.base.mass * vb.squaredNorm() +
               0.5 * model_.base.inertia_about_com * s.v(2) * s.v(2);
    for (int k = 0; k < kNumLegs; ++k) {
      const auto& L = bk.leg[k];
      e += 0.5 * model_.upper.mass * L.upper_com_vel.squaredNorm() +
           0.5 * model_.upper.inertia_about_com * L.th1_dot * L.th1_dot;
      e += 0.5 * lower_mass_[k] * L.lower_com_vel.squaredNorm() +
           0.5 * lower_inertia_[k] * L.th2_dot * L.th2_dot;
    }
    return e;
  }

  double potential_energy(const GeneralizedState& s) const {
    const BodyKinematics bk = body_kinematics(s);
    const Vec2 g = model_.gravity;
    double e = -model_.base.mass * g.dot(bk.base_pos);
    for (int k = 0; k < kNumLegs; ++k)
      e += -model_.upper.mass * g.dot(bk.leg[k].upper_com) -
           lower_mass_[k] * g.dot(bk.leg[k].lower_com);
    return e;
  }

  static Mat2 rotation(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat2 r;
    r << c, -s, s, c;
    return r;
  }

 private:
  // M_ij += m Ji.Jj + I wi wj over the five columns (x, z, phi, sh, el).
  static void accumulate_body(Mat3& A, Eigen::Matrix<double, 3, 2>& B, Mat2& D, double m,
                              double inertia, const Vec2& jphi, const Vec2& jsh, const Vec2& jel,
                              bool has_sh, bool has_el) {
    A(0, 0) += m;
    A(1, 1) += m;
    A(0, 2) += m * jphi.x();
    A(1, 2) += m * jphi.y();
    A(2, 0) += m * jphi.x();
    A(2, 1) += m * jphi.y();
    A(2, 2) += m * jphi.squaredNorm() + inertia;
    if (has_sh) {
      B(0, 0) += m * jsh.x();
      B(1, 0) += m * jsh.y();
      B(2, 0) += m * jphi.dot(jsh) + inertia;
      D(0, 0) += m * jsh.squaredNorm() + inertia;
    }
    if (has_el) {
      B(0, 1) += m * jel.x();
      B(1, 1) += m * jel.y();
      B(2, 1) += m * jphi.dot(jel) + inertia;
      const double od = m * jsh.dot(jel) + inertia;
      D(0, 1) += od;
      D(1, 0) += od;
      D(1, 1) += m * jel.squaredNorm() + inertia;
    }
  }

  void refold() {
    const double ml = model_.lower.mass;
    const double cl = model_.lower.com_offset.x();
    const double l2 = model_.lower.length;
    const double il = model_.lower.inertia_about_com;
    for (int k = 0; k < kNumLegs; ++k) {
      const double mf = foot_mass_[k];
      const double m = ml + mf;
      const double d = (ml * cl + mf * l2) / m;
      lower_mass_[k] = m;
      lower_com_dist_[k] = d;
      lower_inertia_[k] = il + ml * square(d - cl) + mf * square(l2 - d);
    }
  }

  RobotModel model_;
  std::array<double, kNumLegs> foot_mass_{};
  std::array<double, kNumLegs> lower_mass_{};
  std::array<double, kNumLegs> lower_com_dist_{};
  std::array<double, kNumLegs> lower_inertia_{};
};

}  // namespace floatquad
