#pragma once

#include "reachcert/bezier.hpp"
#include "reachcert/bounds.hpp"
#include "reachcert/so3.hpp"

namespace reachcert {

struct QuadState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Mat3 R = Mat3::Identity();
  Vec3 w = Vec3::Zero();
};

// Reference state fed to the controller: position derivatives to order
// four plus the induced attitude, body rate and body-rate derivative.
struct DesiredState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  Vec3 j = Vec3::Zero();
  Vec3 s = Vec3::Zero();
  Mat3 R = Mat3::Identity();
  Vec3 w = Vec3::Zero();
  Vec3 wdot = Vec3::Zero();
};

struct TrackingErrors {
  Vec3 e_p = Vec3::Zero();
  Vec3 e_v = Vec3::Zero();
  Vec3 e_R = Vec3::Zero();
  Vec3 e_w = Vec3::Zero();
  double psi = 0.0;
};

struct ControlOutput {
  double f = 0.0;  // collective thrust along the actual body z axis
  Vec3 tau = Vec3::Zero();
  Vec3 F_d = Vec3::Zero();
  Vec3 delta_f = Vec3::Zero();  // thrust-projection mismatch
};

TrackingErrors tracking_errors(const QuadState& s, const DesiredState& d);

Vec3 desired_force(const Vec3& e_p, const Vec3& e_v, const Vec3& a_d,
                   const Gains& g, const PhysicalParams& p);

// Attitude whose third column is F_d normalized; throws SingularityError
// when the force points close enough to straight down that the frame
// construction degenerates (norm(F_d) + F_d_z below 1e-9 max(1, norm)).
Mat3 desired_attitude(const Vec3& F_d);

// Directional derivative of desired_attitude along a force rate.
Mat3 desired_attitude_rate(const Vec3& F_d, const Vec3& F_d_dot);

// Time derivative of the desired force along the closed loop.
Vec3 force_rate(const Vec3& e_p, const Vec3& e_v, const Vec3& delta_f,
                const Vec3& j_d, const Gains& g, const PhysicalParams& p);

// Body rate induced by the attitude map: vee(R_d^T dR_d).
Vec3 desired_rate(const Vec3& F_d, const Vec3& F_d_dot);

// Everything the control law needs at (t, state), including the body-rate
// derivative, which is obtained by differencing desired_rate along a short
// closed-loop flow (the feed-forward during the internal micro-steps uses
// a zero body-rate derivative; the induced torque error is O(h)).
DesiredState build_desired(const PiecewiseBezier& curve, double t,
                           const QuadState& state, const Gains& g,
                           const PhysicalParams& p);

ControlOutput control(const QuadState& s, const DesiredState& d,
                      const Gains& g, const PhysicalParams& p);

// Attitude-error transport matrix: 0.5 (tr(R^T R_d) I - R^T R_d).
Mat3 error_rate_matrix(const Mat3& R, const Mat3& R_d);

// Membership of a concrete state in the certified initial set, relative
// to the trajectory's start.
InitialSetReport initial_set_check(const QuadState& x0,
                                   const PiecewiseBezier& curve,
                                   const Gains& g, const PhysicalParams& p,
                                   const BoundConfig& cfg);

}  // namespace reachcert
