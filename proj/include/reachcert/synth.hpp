#pragma once

#include <string>
#include <vector>

#include "reachcert/bezier.hpp"
#include "reachcert/bounds.hpp"
#include "reachcert/geometry.hpp"
#include "reachcert/lp.hpp"
#include "reachcert/tube.hpp"

namespace reachcert {

struct SynthParams {
  double t0 = 10.0;       // first horizon tried
  double alpha_t = 1.1;   // horizon growth factor, > 1
  int max_outer_iters = 60;
  double eps = 1e-6;      // slack on the vertical thrust floor
  int degree = 14;        // Bezier degree per segment
  bool terminal_rest = false;  // pin zero velocity/acceleration at the end
};

struct SynthResult {
  bool success = false;
  PiecewiseBezier curve;
  double horizon = 0.0;
  int outer_iters = 0;
  LpStatus last_status = LpStatus::Infeasible;
  std::vector<double> attempted_horizons;
  SafeTube tube;  // after degenerate-waypoint merging
};

// Fits one Bezier segment per tube segment: durations split the horizon
// proportionally to chord length, the tube boxes and dynamic envelopes
// become the feasibility program from assemble(), and an infeasible
// horizon is regrown by alpha_t until the program admits a point or the
// iteration budget runs out. Near-duplicate waypoints (chord below
// 1e-9 of the path length) are merged first, keeping the later box; the
// merged tube is re-verified and returned in the result.
SynthResult synthesize(const SafeTube& tube, const BoundSet& bounds,
                       const Scenario& scenario, const BoundConfig& cfg,
                       const PhysicalParams& phys,
                       const SynthParams& params = {});

struct DenseCheck {
  std::string name;
  long violations = 0;
  double worst_margin = 0.0;  // value - limit; negative means satisfied
  double worst_time = 0.0;
};

struct DenseReport {
  std::vector<DenseCheck> checks;
  long points = 0;
  bool pass = false;
};

// Samples every segment at points_per_segment parameter values (endpoints
// included) and checks the conditions the tracking certificate needs from
// the reference: each segment inside its tube box, the curve inside the
// shrunk domain and clear of grown obstacles, per-axis speed within
// v_max - Lv, total commanded acceleration g*e3 + a within a_max, vertical
// thrust above its floor, the endpoint in the shrunk target, and the
// start conditions (position, velocity, zero acceleration and jerk) to
// machine precision. A margin above tol counts as a violation.
DenseReport verify_trajectory(const PiecewiseBezier& curve,
                              const SafeTube& tube, const BoundSet& bounds,
                              const Scenario& scenario, const BoundConfig& cfg,
                              const PhysicalParams& phys,
                              int points_per_segment = 10000,
                              double tol = 1e-9);

}  // namespace reachcert
