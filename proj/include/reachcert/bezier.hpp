#pragma once

#include <vector>

#include "reachcert/bounds.hpp"
#include "reachcert/geometry.hpp"
#include "reachcert/lp.hpp"
#include "reachcert/so3.hpp"
#include "reachcert/tube.hpp"

namespace reachcert {

// Piecewise polynomial in Bernstein form: one degree-N curve per segment,
// each parameterized over its own duration. Control points are stored as
// 3 x (degree+1) blocks, one per segment.
struct PiecewiseBezier {
  int degree = 0;
  std::vector<double> durations;
  std::vector<Eigen::Matrix3Xd> control_points;

  int num_segments() const { return static_cast<int>(durations.size()); }
  double total_time() const;
  // Cumulative segment boundaries t_0 = 0 .. t_{N_s} = T.
  std::vector<double> knots() const;
};

// Throws DomainError unless segment counts match, durations are positive,
// every block is 3 x (degree+1) and the degree is at least four (the
// junction conditions reach the fourth derivative).
void validate(const PiecewiseBezier& curve);

// binomial(N,i) t^i (1-t)^(N-i) on [0,1], with 0^0 taken as 1.
double bernstein(int i, int n, double t);

// Order-k derivative (k in [0;4]) at t in [0,T]. Interior segment
// boundaries evaluate on the right segment.
Vec3 eval(const PiecewiseBezier& curve, double t, int order = 0);

struct CurveSample {
  Vec3 p, v, a, j, s;
};

CurveSample sample(const PiecewiseBezier& curve, double t);

// Feasibility program over all control points for the given durations:
// initial position/velocity match and vanishing initial acceleration and
// jerk, per-segment box containment, junction continuity through the
// fourth derivative, component-wise velocity and specific-force envelopes
// shrunk by the tracking bounds, the vertical thrust floor, and the
// terminal box. Variables are indexed (segment, point, axis), axis fastest.
// terminal_rest additionally pins the final velocity and acceleration to
// zero.
LpProblem assemble(const SafeTube& tube, const BoundSet& bounds,
                   const Scenario& scenario, const BoundConfig& cfg,
                   const PhysicalParams& phys,
                   const std::vector<double>& durations, int degree,
                   bool terminal_rest = false);

inline int control_var(int segment, int point, int axis, int degree) {
  return (segment * (degree + 1) + point) * 3 + axis;
}

}  // namespace reachcert
