#pragma once

#include <vector>

#include "reachcert/so3.hpp"

namespace reachcert {

// Axis-aligned box [lo, hi], lo <= hi componentwise.
struct Box3 {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();

  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 radius() const { return 0.5 * (hi - lo); }

  // Closed membership.
  bool contains(const Vec3& x) const {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
  }
  bool contains(const Box3& b) const {
    return (b.lo.array() >= lo.array()).all() &&
           (b.hi.array() <= hi.array()).all();
  }
  // Strict separation on some axis; touching boxes are not disjoint.
  bool disjoint(const Box3& b) const {
    return (hi.array() < b.lo.array()).any() ||
           (lo.array() > b.hi.array()).any();
  }
  // Open membership; boundary points are outside.
  bool strictly_contains(const Vec3& x) const {
    return (x.array() > lo.array()).all() && (x.array() < hi.array()).all();
  }
};

struct Scenario {
  Box3 X_o;                 // operating domain
  std::vector<Box3> X_u;    // obstacles
  Box3 X_t;                 // target
  Vec3 p0 = Vec3::Zero();   // initial position
  Vec3 v0 = Vec3::Zero();   // initial velocity
  Vec3 v_max = Vec3::Zero();
  double f_max = 0.0;
  Vec3 a_max = Vec3::Zero();
};

// Scenario with the tracking-error margin budgeted in: domain and target
// shrunk, obstacles grown, all by the same infinity-norm radius.
struct InflatedScenario {
  Box3 X_o;
  std::vector<Box3> X_u;
  Box3 X_t;
  Vec3 p0 = Vec3::Zero();
};

// Throws InfeasibleError naming the violated invariant: target inside
// domain and clear of obstacles, p0 interior to the domain and clear of
// obstacles, |v0| < v_max componentwise, f_max > 0.
void validate(const Scenario& sc);

// Center preserved, radius +/- r. Deflation of a box thinner than 2r is an
// InfeasibleError (the margin exceeds the set).
Box3 inflate(const Box3& b, double r);
Box3 deflate(const Box3& b, double r);

// Applies deflate/inflate with margin r across the scenario and rejects
// results in which the shrunk target meets a grown obstacle (no safe
// terminal box would exist).
InflatedScenario inflate_scenario(const Scenario& sc, double r);

// Componentwise clamp of x into b; minimizes the infinity-norm distance.
Vec3 closest_point(const Vec3& x, const Box3& b);

// How far x sticks out of b on the worst axis; <= 0 iff x in b (closed).
inline double box_exceedance(const Vec3& x, const Box3& b) {
  return ((b.lo - x).cwiseMax(x - b.hi)).maxCoeff();
}

// Depth of x inside b; > 0 iff x interior, 0 on the boundary.
inline double box_penetration(const Vec3& x, const Box3& b) {
  return ((x - b.lo).cwiseMin(b.hi - x)).minCoeff();
}

// Largest centered box around v inside b. Pre: v in b.
Box3 safe_box(const Vec3& v, const Box3& b);  // centered_box of the radius below

// Slab |z_axis - center| <= half_width on the coordinate attaining the
// infinity-norm distance from x to b (lowest index on ties).
struct SafeStrip {
  int axis = 0;
  double center = 0.0;
  double half_width = 0.0;
};

// Pre: x outside b (closed), alpha in [0,1). The strip is disjoint from b.
SafeStrip safe_strip(const Vec3& x, const Box3& b, double alpha);

// Centered boxes are canonically (center, radius) pairs: the box edges are
// the rounded sums center +/- radius, and every consumer that rebuilds the
// box from the same pair gets bitwise identical edges. The guarantees
// below hold for those rounded edges.
inline Box3 centered_box(const Vec3& center, const Vec3& radius) {
  return Box3{center - radius, center + radius};
}

Vec3 safe_box_radius(const Vec3& v, const Box3& b);

// Intersection of safe_box(y, domain) with every obstacle's strip, as a
// radius around y. Pre: y in the inflated free space. The rebuilt box
// contains y, stays inside the domain, and is verified disjoint from every
// obstacle by exact box arithmetic before return.
Vec3 safe_region_radius(const Vec3& y, const InflatedScenario& inf,
                        double alpha);

inline Box3 safe_region(const Vec3& y, const InflatedScenario& inf,
                        double alpha) {
  return centered_box(y, safe_region_radius(y, inf, alpha));
}

}  // namespace reachcert
