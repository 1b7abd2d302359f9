#include "reachcert/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "reachcert/errors.hpp"

namespace reachcert {

namespace {

using Vec18 = Eigen::Matrix<double, 18, 1>;

Vec18 pack(const QuadState& s) {
  Vec18 y;
  y.segment<3>(0) = s.p;
  y.segment<3>(3) = s.v;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      y(6 + 3 * i + j) = s.R(i, j);
    }
  }
  y.segment<3>(15) = s.w;
  return y;
}

QuadState unpack(const Vec18& y) {
  QuadState s;
  s.p = y.segment<3>(0);
  s.v = y.segment<3>(3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      s.R(i, j) = y(6 + 3 * i + j);
    }
  }
  s.w = y.segment<3>(15);
  return s;
}

// Dormand-Prince 5(4) coefficients.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,      0.0,        500.0 / 1113,
                           125.0 / 192,     -2187.0 / 6784,
                           11.0 / 84,       0.0};
constexpr double kB4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695,
                           393.0 / 640,     -92097.0 / 339200,
                           187.0 / 2100,    1.0 / 40};

double clamped(double t, double total) { return std::clamp(t, 0.0, total); }

void bump_check(CheckResult& c, double value, double limit, double t) {
  const double margin = value - limit;
  if (margin > c.worst_margin) {
    c.worst_margin = margin;
    c.worst_time = t;
  }
  if (margin > 0.0) {
    ++c.violations;
  }
}

}  // namespace

StateTangent state_derivative(const QuadState& s, double f, const Vec3& tau,
                              const PhysicalParams& p) {
  StateTangent d;
  d.dp = s.v;
  d.dv = -p.g * Vec3::UnitZ() + (f / p.m) * s.R.col(2);
  d.dR = s.R * hat(s.w);
  d.dw = p.J.inverse() * (tau - s.w.cross(p.J * s.w));
  return d;
}

SimulationTrace integrate(const QuadState& x0, const PiecewiseBezier& curve,
                          const Gains& g, const PhysicalParams& p,
                          const BoundSet& bounds, const BoundConfig& cfg,
                          const SimOptions& opts) {
  validate(curve);
  const double T = curve.total_time();

  if (!opts.force) {
    const InitialSetReport gate = initial_set_check(x0, curve, g, p, cfg);
    if (!gate.member) {
      throw DomainError(
          "integrate: initial state is outside the certified initial set "
          "(pass force to simulate anyway)");
    }
  }

  // Output grid plus segment boundaries, each hit exactly.
  std::vector<double> events;
  events.push_back(0.0);
  const double dt = 1.0 / opts.output_rate_hz;
  for (long k = 1; static_cast<double>(k) * dt < T; ++k) {
    events.push_back(static_cast<double>(k) * dt);
  }
  for (const double tk : curve.knots()) {
    events.push_back(tk);
  }
  events.push_back(T);
  std::sort(events.begin(), events.end());
  const double merge_tol = 1e-12 * std::max(1.0, T);
  events.erase(std::unique(events.begin(), events.end(),
                           [&](double a, double b) {
                             return std::abs(a - b) <= merge_tol;
                           }),
               events.end());

  auto rhs = [&](double t, const Vec18& y) {
    const QuadState s = unpack(y);
    const DesiredState d = build_desired(curve, clamped(t, T), s, g, p);
    const ControlOutput u = control(s, d, g, p);
    const StateTangent dot = state_derivative(s, u.f, u.tau, p);
    Vec18 dy;
    dy.segment<3>(0) = dot.dp;
    dy.segment<3>(3) = dot.dv;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        dy(6 + 3 * i + j) = dot.dR(i, j);
      }
    }
    dy.segment<3>(15) = dot.dw;
    return dy;
  };

  SimulationTrace trace;
  auto record = [&](double t, const QuadState& s) {
    const DesiredState d = build_desired(curve, clamped(t, T), s, g, p);
    const ControlOutput u = control(s, d, g, p);
    TraceSample out;
    out.t = t;
    out.x = s;
    out.e = tracking_errors(s, d);
    out.V1 = eval_V1(out.e.e_p, out.e.e_v, bounds.mats);
    out.V2 = eval_V2(out.e.e_R, out.e.e_w, out.e.psi, bounds.mats, g, p);
    out.V = out.V1 + out.V2;
    out.f = u.f;
    out.Fd3 = u.F_d(2);
    trace.samples.push_back(out);
  };

  QuadState state = x0;
  record(0.0, state);
  Vec18 y = pack(state);
  double t = 0.0;
  double h = events.size() > 1 ? std::min(1e-3, events[1]) : 1e-3;

  try {
    for (std::size_t ev = 1; ev < events.size(); ++ev) {
      const double te = events[ev];
      while (t < te) {
        const double h_try = std::min(h, te - t);
        if (h_try < 1e-12) {
          throw IntegrationError("integrate: step size underflow");
        }

        Vec18 k[7];
        k[0] = rhs(t, y);
        for (int i = 1; i < 7; ++i) {
          Vec18 yi = y;
          for (int j = 0; j < i; ++j) {
            if (kA[i][j] != 0.0) {
              yi += (h_try * kA[i][j]) * k[j];
            }
          }
          k[i] = rhs(t + kC[i] * h_try, yi);
        }
        Vec18 y5 = y, err = Vec18::Zero();
        for (int i = 0; i < 7; ++i) {
          if (kB5[i] != 0.0) {
            y5 += (h_try * kB5[i]) * k[i];
          }
          err += (h_try * (kB5[i] - kB4[i])) * k[i];
        }
        double sum = 0.0;
        for (int i = 0; i < 18; ++i) {
          const double sc =
              opts.abs_tol +
              opts.rel_tol * std::max(std::abs(y(i)), std::abs(y5(i)));
          sum += (err(i) / sc) * (err(i) / sc);
        }
        const double enorm = std::sqrt(sum / 18.0);

        if (enorm <= 1.0) {
          t = t + h_try;
          if (te - t < merge_tol) {
            t = te;
          }
          QuadState s = unpack(y5);
          s.R = project_rotation(s.R);
          y = pack(s);
          ++trace.accepted;
          const double grow =
              enorm == 0.0 ? 5.0
                           : std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 5.0);
          h = h_try * grow;
        } else {
          ++trace.rejected;
          h = h_try * std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 1.0);
        }
        if (trace.accepted + trace.rejected > 20'000'000L) {
          throw IntegrationError("integrate: step budget exhausted");
        }
      }
      record(te, unpack(y));
    }
  } catch (const SingularityError& ex) {
    const QuadState s = unpack(y);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  " [aborted at t=%.9g, p=(%.6g, %.6g, %.6g), v=(%.6g, %.6g, "
                  "%.6g)]",
                  t, s.p(0), s.p(1), s.p(2), s.v(0), s.v(1), s.v(2));
    throw SingularityError(std::string(ex.what()) + buf, t);
  }

  return trace;
}

CertificationReport certify_trace(const SimulationTrace& trace,
                                  const BoundSet& bounds,
                                  const Scenario& scenario,
                                  const CertifyPolicy& policy) {
  CertificationReport report;
  report.samples = static_cast<long>(trace.samples.size());
  const double neg_inf = -std::numeric_limits<double>::infinity();
  for (const char* name :
       {"tracking_position", "tracking_velocity", "velocity_limit",
        "thrust_limit", "vertical_thrust", "energy_envelope",
        "attitude_envelope", "position_safe", "terminal_box"}) {
    report.checks.push_back(CheckResult{name, 0, neg_inf, 0.0});
  }
  if (trace.samples.empty()) {
    report.pass = false;
    return report;
  }

  const double v1_0 = trace.samples.front().V1;
  const double v2_0 = trace.samples.front().V2;
  const double rel = 1.0 + policy.rel_slack;

  for (const TraceSample& s : trace.samples) {
    bump_check(report.checks[0], s.e.e_p.norm(), bounds.Lp, s.t);
    bump_check(report.checks[1], s.e.e_v.norm(), bounds.Lv, s.t);

    double vmargin = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
      vmargin = std::max(vmargin, std::abs(s.x.v(a)) - scenario.v_max(a));
    }
    bump_check(report.checks[2], vmargin, 0.0, s.t);

    bump_check(report.checks[3], std::abs(s.f), bounds.Fbar, s.t);
    bump_check(report.checks[4], -s.Fd3, 0.0, s.t);

    const double envelope =
        L_of_t(v1_0, v2_0, s.t, bounds.consts) * rel + policy.sqrt_v_floor;
    bump_check(report.checks[5], std::sqrt(std::max(0.0, s.V)), envelope, s.t);

    const double v2_env =
        v2_0 * std::exp(-2.0 * bounds.consts.beta * s.t) * rel +
        policy.v2_floor;
    bump_check(report.checks[6], s.V2, v2_env, s.t);

    double unsafe = box_exceedance(s.x.p, scenario.X_o);
    for (const Box3& obs : scenario.X_u) {
      unsafe = std::max(unsafe, box_penetration(s.x.p, obs));
    }
    bump_check(report.checks[7], unsafe, 0.0, s.t);
  }

  const TraceSample& last = trace.samples.back();
  bump_check(report.checks[8], box_exceedance(last.x.p, scenario.X_t), 0.0,
             last.t);

  report.pass = true;
  for (const CheckResult& c : report.checks) {
    if (c.violations > 0) {
      report.pass = false;
    }
  }
  return report;
}

}  // namespace reachcert
