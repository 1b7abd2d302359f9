#include "reachcert/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reachcert/errors.hpp"

namespace reachcert {

namespace {

// Chord lengths between consecutive waypoints.
std::vector<double> chords(const SafeTube& tube) {
  std::vector<double> l(tube.segments());
  for (std::size_t i = 0; i + 1 < tube.waypoints.size(); ++i) {
    l[i] = (tube.waypoints[i + 1] - tube.waypoints[i]).norm();
  }
  return l;
}

// Drops waypoints whose incoming chord is negligible against the total
// path length. The interior endpoint of the degenerate chord goes, so the
// start waypoint and the terminal box always survive. The result must
// still satisfy the chain conditions; with near-identical neighbours it
// does, and verify_tube confirms it exactly.
SafeTube merge_degenerate(const SafeTube& tube,
                          const InflatedScenario& inflated) {
  SafeTube merged = tube;
  for (;;) {
    if (merged.segments() <= 1) {
      break;
    }
    const std::vector<double> l = chords(merged);
    double total = 0.0;
    for (double li : l) {
      total += li;
    }
    std::size_t drop = merged.waypoints.size();
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (l[i] < 1e-9 * total) {
        drop = (i == 0) ? 1 : i;  // interior endpoint of chord i
        break;
      }
    }
    if (drop == merged.waypoints.size()) {
      break;
    }
    merged.waypoints.erase(merged.waypoints.begin() +
                           static_cast<std::ptrdiff_t>(drop));
    merged.radii.erase(merged.radii.begin() +
                       static_cast<std::ptrdiff_t>(drop));
  }
  if (merged.waypoints.size() < tube.waypoints.size() &&
      !verify_tube(merged, inflated)) {
    throw Error("synthesize: merging degenerate waypoints broke the tube");
  }
  return merged;
}

PiecewiseBezier from_solution(const Eigen::VectorXd& point,
                              const std::vector<double>& durations,
                              int degree) {
  PiecewiseBezier curve;
  curve.degree = degree;
  curve.durations = durations;
  curve.control_points.resize(durations.size());
  for (std::size_t s = 0; s < durations.size(); ++s) {
    Eigen::Matrix3Xd pts(3, degree + 1);
    for (int j = 0; j <= degree; ++j) {
      for (int a = 0; a < 3; ++a) {
        pts(a, j) = point(control_var(s, j, a, degree));
      }
    }
    curve.control_points[s] = pts;
  }
  return curve;
}

void bump(DenseCheck& c, double margin, double t, double tol) {
  if (margin > tol) {
    ++c.violations;
  }
  if (margin > c.worst_margin) {
    c.worst_margin = margin;
    c.worst_time = t;
  }
}

}  // namespace

SynthResult synthesize(const SafeTube& tube, const BoundSet& bounds,
                       const Scenario& scenario, const BoundConfig& cfg,
                       const PhysicalParams& phys, const SynthParams& params) {
  if (!(params.t0 > 0.0) || !std::isfinite(params.t0)) {
    throw DomainError("synthesize: t0 must be positive");
  }
  if (!(params.alpha_t > 1.0) || !std::isfinite(params.alpha_t)) {
    throw DomainError("synthesize: alpha_t must exceed 1");
  }
  if (params.max_outer_iters < 1) {
    throw DomainError("synthesize: max_outer_iters must be at least 1");
  }
  if (params.degree < 4) {
    throw DomainError("synthesize: degree must be at least 4");
  }
  if (!(params.eps > 0.0)) {
    throw DomainError("synthesize: eps must be positive");
  }
  validate(scenario);
  const InflatedScenario inflated = inflate_scenario(scenario, bounds.Lp);
  if (!verify_tube(tube, inflated)) {
    throw DomainError("synthesize: tube fails the chain conditions");
  }

  SynthResult result;
  result.tube = merge_degenerate(tube, inflated);
  if (result.tube.segments() == 0) {
    // Start already in the terminal box: plan a single hover segment whose
    // box is the terminal box itself.
    result.tube.waypoints.push_back(result.tube.waypoints.front());
    result.tube.radii.push_back(result.tube.radii.front());
  }
  const SafeTube& planned = result.tube;
  const std::size_t ns = planned.segments();

  const std::vector<double> l = chords(planned);
  double total = 0.0;
  for (double li : l) {
    total += li;
  }
  std::vector<double> fractions(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    fractions[i] = total > 0.0 ? l[i] / total
                               : 1.0 / static_cast<double>(ns);
  }

  BoundConfig solve_cfg = cfg;
  solve_cfg.eps = params.eps;

  double horizon = params.t0;
  for (int k = 0; k < params.max_outer_iters; ++k) {
    result.attempted_horizons.push_back(horizon);
    result.outer_iters = k + 1;
    std::vector<double> durations(ns);
    for (std::size_t i = 0; i < ns; ++i) {
      durations[i] = fractions[i] * horizon;
    }
    const LpProblem lp = assemble(planned, bounds, scenario, solve_cfg, phys,
                                  durations, params.degree,
                                  params.terminal_rest);
    const LpSolution sol = solve_feasibility(lp);
    result.last_status = sol.status;
    if (sol.status == LpStatus::Feasible) {
      result.curve = from_solution(sol.point, durations, params.degree);
      validate(result.curve);
      result.horizon = horizon;
      result.success = true;
      return result;
    }
    horizon *= params.alpha_t;
  }
  return result;
}

DenseReport verify_trajectory(const PiecewiseBezier& curve,
                              const SafeTube& tube, const BoundSet& bounds,
                              const Scenario& scenario, const BoundConfig& cfg,
                              const PhysicalParams& phys,
                              int points_per_segment, double tol) {
  validate(curve);
  if (points_per_segment < 2) {
    throw DomainError("verify_trajectory: need at least 2 points per segment");
  }
  if (static_cast<std::size_t>(curve.num_segments()) != tube.segments()) {
    throw DomainError("verify_trajectory: curve and tube segment counts differ");
  }
  const InflatedScenario inflated = inflate_scenario(scenario, bounds.Lp);

  DenseReport report;
  for (const char* name :
       {"segment_box", "free_space", "velocity_envelope", "accel_envelope",
        "thrust_floor", "terminal_box", "initial_conditions"}) {
    DenseCheck c;
    c.name = name;
    c.worst_margin = -std::numeric_limits<double>::infinity();
    report.checks.push_back(c);
  }
  DenseCheck& seg_box = report.checks[0];
  DenseCheck& free_space = report.checks[1];
  DenseCheck& vel = report.checks[2];
  DenseCheck& acc = report.checks[3];
  DenseCheck& floor = report.checks[4];
  DenseCheck& terminal = report.checks[5];
  DenseCheck& initial = report.checks[6];

  const std::vector<double> knots = curve.knots();
  const double horizon = knots.back();
  const Vec3 vel_limit = scenario.v_max - Vec3::Constant(bounds.Lv);
  const double floor_rhs = bounds.Lf - phys.m * phys.g + cfg.eps;

  for (int s = 0; s < curve.num_segments(); ++s) {
    const Box3 box = tube.box(static_cast<std::size_t>(s));
    for (int k = 0; k < points_per_segment; ++k) {
      const double u =
          static_cast<double>(k) / static_cast<double>(points_per_segment - 1);
      const double t =
          std::min(knots[static_cast<std::size_t>(s)] + u * curve.durations[s],
                   horizon);
      const Vec3 p = eval(curve, t, 0);
      const Vec3 v = eval(curve, t, 1);
      const Vec3 a = eval(curve, t, 2);

      bump(seg_box, box_exceedance(p, box), t, tol);

      double unsafe = box_exceedance(p, inflated.X_o);
      for (const Box3& obs : inflated.X_u) {
        unsafe = std::max(unsafe, box_penetration(p, obs));
      }
      bump(free_space, unsafe, t, tol);

      bump(vel, (v.cwiseAbs() - vel_limit).maxCoeff(), t, tol);
      bump(acc,
           ((Vec3(0.0, 0.0, phys.g) + a).cwiseAbs() - scenario.a_max)
               .maxCoeff(),
           t, tol);
      bump(floor, floor_rhs - phys.m * a(2), t, tol);
      ++report.points;
    }
  }

  bump(terminal, box_exceedance(eval(curve, horizon, 0), inflated.X_t),
       horizon, tol);

  double start = (eval(curve, 0.0, 0) - scenario.p0).cwiseAbs().maxCoeff();
  start = std::max(start,
                   (eval(curve, 0.0, 1) - scenario.v0).cwiseAbs().maxCoeff());
  start = std::max(start, eval(curve, 0.0, 2).cwiseAbs().maxCoeff());
  start = std::max(start, eval(curve, 0.0, 3).cwiseAbs().maxCoeff());
  bump(initial, start, 0.0, tol);

  report.pass = true;
  for (const DenseCheck& c : report.checks) {
    if (c.violations > 0) {
      report.pass = false;
    }
  }
  return report;
}

}  // namespace reachcert
