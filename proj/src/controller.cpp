#include "reachcert/controller.hpp"

#include <algorithm>
#include <cmath>

#include "reachcert/errors.hpp"

namespace reachcert {

namespace {

constexpr double kSingularityTol = 1e-9;

// Reference state at (t, state) without the body-rate derivative; used
// both as the first stage of build_desired and inside its micro-flow,
// where the missing feed-forward only perturbs the torque at O(h).
DesiredState desired_instant(const PiecewiseBezier& curve, double t,
                             const QuadState& state, const Gains& g,
                             const PhysicalParams& p) {
  const CurveSample c = sample(curve, t);
  DesiredState d;
  d.p = c.p;
  d.v = c.v;
  d.a = c.a;
  d.j = c.j;
  d.s = c.s;
  const Vec3 e_p = state.p - c.p;
  const Vec3 e_v = state.v - c.v;
  const Vec3 F_d = desired_force(e_p, e_v, c.a, g, p);
  d.R = desired_attitude(F_d);
  const Vec3 b3 = state.R.col(2);
  const Vec3 delta_f = F_d.dot(b3) * b3 - F_d;
  d.w = desired_rate(F_d, force_rate(e_p, e_v, delta_f, c.j, g, p));
  return d;
}

struct StateRate {
  Vec3 dp, dv;
  Mat3 dR;
  Vec3 dw;
};

StateRate closed_loop_rate(const QuadState& x, const PiecewiseBezier& curve,
                           double t, const Gains& g, const PhysicalParams& p) {
  const double T = curve.total_time();
  const DesiredState d =
      desired_instant(curve, std::clamp(t, 0.0, T), x, g, p);
  const ControlOutput u = control(x, d, g, p);
  StateRate r;
  r.dp = x.v;
  r.dv = -p.g * Vec3::UnitZ() + (u.f / p.m) * x.R.col(2);
  r.dR = x.R * hat(x.w);
  r.dw = p.J.inverse() * (u.tau - x.w.cross(p.J * x.w));
  return r;
}

QuadState advance(const QuadState& x, const StateRate& r, double h) {
  QuadState y;
  y.p = x.p + h * r.dp;
  y.v = x.v + h * r.dv;
  y.R = x.R + h * r.dR;
  y.w = x.w + h * r.dw;
  return y;
}

// One fixed RK4 step of the closed loop; h may be negative.
QuadState micro_step(const QuadState& x, const PiecewiseBezier& curve,
                     double t, double h, const Gains& g,
                     const PhysicalParams& p) {
  const StateRate k1 = closed_loop_rate(x, curve, t, g, p);
  const StateRate k2 =
      closed_loop_rate(advance(x, k1, 0.5 * h), curve, t + 0.5 * h, g, p);
  const StateRate k3 =
      closed_loop_rate(advance(x, k2, 0.5 * h), curve, t + 0.5 * h, g, p);
  const StateRate k4 = closed_loop_rate(advance(x, k3, h), curve, t + h, g, p);
  QuadState y;
  y.p = x.p + h / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  y.v = x.v + h / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  y.R = x.R + h / 6.0 * (k1.dR + 2.0 * k2.dR + 2.0 * k3.dR + k4.dR);
  y.w = x.w + h / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
  return y;
}

}  // namespace

TrackingErrors tracking_errors(const QuadState& s, const DesiredState& d) {
  TrackingErrors e;
  e.e_p = s.p - d.p;
  e.e_v = s.v - d.v;
  const Mat3 A = d.R.transpose() * s.R;  // R_d^T R
  e.e_R = 0.5 * vee(A - A.transpose());
  e.e_w = s.w - A.transpose() * d.w;
  double psi = 0.5 * (3.0 - A.trace());
  if (psi < 1e-6) {
    // Trace cancellation dominates near zero; recover psi from the
    // rotation error identity |e_R|^2 = psi (2 - psi) instead.
    const double n2 = e.e_R.squaredNorm();
    psi = n2 / (1.0 + std::sqrt(std::max(0.0, 1.0 - n2)));
  }
  e.psi = std::clamp(psi, 0.0, 2.0);
  return e;
}

Vec3 desired_force(const Vec3& e_p, const Vec3& e_v, const Vec3& a_d,
                   const Gains& g, const PhysicalParams& p) {
  return -g.kp * e_p - g.kv * e_v + p.m * p.g * Vec3::UnitZ() + p.m * a_d;
}

Mat3 desired_attitude(const Vec3& F_d) {
  const double n = F_d.norm();
  const double s = n + F_d(2);
  if (s < kSingularityTol * std::max(1.0, n)) {
    throw SingularityError(
        "desired attitude undefined: force direction opposes the vertical "
        "axis");
  }
  const double f1 = F_d(0), f2 = F_d(1), f3 = F_d(2);
  Mat3 R;
  R.col(0) = Vec3(f3 + f2 * f2 / s, -f1 * f2 / s, -f1) / n;
  R.col(1) = Vec3(-f1 * f2 / s, f3 + f1 * f1 / s, -f2) / n;
  R.col(2) = F_d / n;
  return R;
}

Mat3 desired_attitude_rate(const Vec3& F_d, const Vec3& F_d_dot) {
  const double n = F_d.norm();
  const double s = n + F_d(2);
  if (s < kSingularityTol * std::max(1.0, n)) {
    throw SingularityError(
        "desired attitude undefined: force direction opposes the vertical "
        "axis");
  }
  const double f1 = F_d(0), f2 = F_d(1), f3 = F_d(2);
  const double g1 = F_d_dot(0), g2 = F_d_dot(1), g3 = F_d_dot(2);
  const double ndot = F_d.dot(F_d_dot) / n;
  const double sdot = ndot + g3;
  const double s2 = s * s;

  const Vec3 b1(f3 + f2 * f2 / s, -f1 * f2 / s, -f1);
  const Vec3 b2(-f1 * f2 / s, f3 + f1 * f1 / s, -f2);
  const Vec3 db1(g3 + (2.0 * f2 * g2 * s - f2 * f2 * sdot) / s2,
                 -((g1 * f2 + f1 * g2) * s - f1 * f2 * sdot) / s2, -g1);
  const Vec3 db2(-((g1 * f2 + f1 * g2) * s - f1 * f2 * sdot) / s2,
                 g3 + (2.0 * f1 * g1 * s - f1 * f1 * sdot) / s2, -g2);

  Mat3 dR;
  dR.col(0) = (db1 - (ndot / n) * b1) / n;
  dR.col(1) = (db2 - (ndot / n) * b2) / n;
  dR.col(2) = (F_d_dot - (ndot / n) * F_d) / n;
  return dR;
}

Vec3 force_rate(const Vec3& e_p, const Vec3& e_v, const Vec3& delta_f,
                const Vec3& j_d, const Gains& g, const PhysicalParams& p) {
  return -g.kp * e_v -
         (g.kv / p.m) * (-g.kp * e_p - g.kv * e_v + delta_f) + p.m * j_d;
}

Vec3 desired_rate(const Vec3& F_d, const Vec3& F_d_dot) {
  const Mat3 R_d = desired_attitude(F_d);
  const Mat3 A = R_d.transpose() * desired_attitude_rate(F_d, F_d_dot);
  return 0.5 * vee(A - A.transpose());
}

DesiredState build_desired(const PiecewiseBezier& curve, double t,
                           const QuadState& state, const Gains& g,
                           const PhysicalParams& p) {
  DesiredState d = desired_instant(curve, t, state, g, p);
  const double T = curve.total_time();
  const double h =
      1e-6 * std::max(1.0, 1.0 / std::max(d.w.norm(), 1e-3));
  if (T < h) {
    return d;
  }
  auto rate_after = [&](double step) {
    const QuadState y = micro_step(state, curve, t, step, g, p);
    return desired_instant(curve, t + step, y, g, p).w;
  };
  if (t - h >= 0.0 && t + h <= T) {
    d.wdot = (rate_after(h) - rate_after(-h)) / (2.0 * h);
  } else if (t + h <= T) {
    d.wdot = (rate_after(h) - d.w) / h;
  } else {
    d.wdot = (d.w - rate_after(-h)) / h;
  }
  return d;
}

ControlOutput control(const QuadState& s, const DesiredState& d,
                      const Gains& g, const PhysicalParams& p) {
  const TrackingErrors e = tracking_errors(s, d);
  ControlOutput out;
  out.F_d = desired_force(e.e_p, e.e_v, d.a, g, p);
  const Vec3 b3 = s.R.col(2);
  out.f = out.F_d.dot(b3);
  out.delta_f = out.F_d.dot(b3) * b3 - out.F_d;
  const Mat3 Q = s.R.transpose() * d.R;
  out.tau = -g.kR * e.e_R - g.kw * e.e_w + s.w.cross(p.J * s.w) -
            p.J * (hat(s.w) * Q * d.w - Q * d.wdot);
  return out;
}

Mat3 error_rate_matrix(const Mat3& R, const Mat3& R_d) {
  const Mat3 Q = R.transpose() * R_d;
  return 0.5 * (Q.trace() * Mat3::Identity() - Q);
}

InitialSetReport initial_set_check(const QuadState& x0,
                                   const PiecewiseBezier& curve,
                                   const Gains& g, const PhysicalParams& p,
                                   const BoundConfig& cfg) {
  const DesiredState d = desired_instant(curve, 0.0, x0, g, p);
  const TrackingErrors e = tracking_errors(x0, d);
  const LyapunovMatrices mats = build_matrices(g, p, cfg);
  const double v1 = eval_V1(e.e_p, e.e_v, mats);
  return initial_set_check(e.psi, e.e_w, v1, g, p, cfg);
}

}  // namespace reachcert
