#include "reachcert/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace reachcert {

namespace {

double spacing(double x) {
  const double ax = std::abs(x);
  return std::nextafter(ax, std::numeric_limits<double>::infinity()) - ax;
}

// Largest r' <= r with the rounded edge y + r' (resp. y - r') on the right
// side of bound. Rounding in y +/- r can overshoot a bound the real sum
// respects by less than an ulp; stepping r down on the edge's ulp grid
// repairs that. Terminates at r = 0, where the edge is y itself and the
// caller's precondition puts y on the right side.
double shrink_upper(double y, double r, double bound, bool strict) {
  while (r > 0.0) {
    const double edge = y + r;
    if (strict ? edge < bound : edge <= bound) {
      break;
    }
    r = std::max(0.0, r - std::max(spacing(edge), spacing(r)));
  }
  return r;
}

double shrink_lower(double y, double r, double bound, bool strict) {
  while (r > 0.0) {
    const double edge = y - r;
    if (strict ? edge > bound : edge >= bound) {
      break;
    }
    r = std::max(0.0, r - std::max(spacing(edge), spacing(r)));
  }
  return r;
}

bool interior(const Vec3& x, const Box3& b) {
  return (x.array() > b.lo.array()).all() && (x.array() < b.hi.array()).all();
}

void require_ordered(const Box3& b, const char* name) {
  if (!(b.lo.array() <= b.hi.array()).all()) {
    throw InfeasibleError(std::string("scenario: box '") + name +
                          "' has lo > hi");
  }
}

}  // namespace

void validate(const Scenario& sc) {
  require_ordered(sc.X_o, "operating_domain");
  require_ordered(sc.X_t, "target");
  for (const Box3& u : sc.X_u) {
    require_ordered(u, "obstacle");
  }
  if (!sc.X_o.contains(sc.X_t)) {
    throw InfeasibleError("scenario: target is not inside the operating domain");
  }
  for (std::size_t i = 0; i < sc.X_u.size(); ++i) {
    if (!sc.X_t.disjoint(sc.X_u[i])) {
      throw InfeasibleError("scenario: target meets obstacle " +
                            std::to_string(i));
    }
  }
  if (!interior(sc.p0, sc.X_o)) {
    throw InfeasibleError(
        "scenario: p0 is not in the interior of the operating domain");
  }
  for (std::size_t i = 0; i < sc.X_u.size(); ++i) {
    if (sc.X_u[i].contains(sc.p0)) {
      throw InfeasibleError("scenario: p0 lies in obstacle " +
                            std::to_string(i));
    }
  }
  if (!(sc.v0.cwiseAbs().array() < sc.v_max.array()).all()) {
    throw InfeasibleError("scenario: |v0| must be below v_max componentwise");
  }
  if (!(sc.f_max > 0.0)) {
    throw InfeasibleError("scenario: f_max must be positive");
  }
  if (!(sc.a_max.array() > 0.0).all()) {
    throw InfeasibleError("scenario: a_max must be positive componentwise");
  }
}

Box3 inflate(const Box3& b, double r) {
  if (!(r >= 0.0)) {
    throw DomainError("inflate: margin must be nonnegative");
  }
  const Vec3 m = Vec3::Constant(r);
  return Box3{b.lo - m, b.hi + m};
}

Box3 deflate(const Box3& b, double r) {
  if (!(r >= 0.0)) {
    throw DomainError("deflate: margin must be nonnegative");
  }
  const Vec3 m = Vec3::Constant(r);
  const Box3 out{b.lo + m, b.hi - m};
  if (!(out.lo.array() <= out.hi.array()).all()) {
    throw InfeasibleError("deflate: margin exceeds the box radius");
  }
  return out;
}

InflatedScenario inflate_scenario(const Scenario& sc, double r) {
  InflatedScenario inf;
  try {
    inf.X_o = deflate(sc.X_o, r);
  } catch (const InfeasibleError&) {
    throw InfeasibleError(
        "inflate_scenario: tracking margin exceeds the operating domain");
  }
  try {
    inf.X_t = deflate(sc.X_t, r);
  } catch (const InfeasibleError&) {
    throw InfeasibleError("inflate_scenario: tracking margin exceeds the target");
  }
  inf.X_u.reserve(sc.X_u.size());
  for (const Box3& u : sc.X_u) {
    inf.X_u.push_back(inflate(u, r));
  }
  for (std::size_t i = 0; i < inf.X_u.size(); ++i) {
    if (!inf.X_t.disjoint(inf.X_u[i])) {
      throw InfeasibleError(
          "inflate_scenario: shrunk target meets grown obstacle " +
          std::to_string(i) + "; no safe terminal box exists");
    }
  }
  inf.p0 = sc.p0;
  return inf;
}

Vec3 closest_point(const Vec3& x, const Box3& b) {
  // Coordinates inside [lo, hi] stay; outside ones snap to the face, which
  // is the center + radius * sign(x - center) case of the definition.
  return x.cwiseMax(b.lo).cwiseMin(b.hi);
}

Vec3 safe_box_radius(const Vec3& v, const Box3& b) {
  if (!b.contains(v)) {
    throw DomainError("safe_box: point must lie inside the box");
  }
  Vec3 r;
  for (int a = 0; a < 3; ++a) {
    r(a) = std::min(b.hi(a) - v(a), v(a) - b.lo(a));
    r(a) = shrink_upper(v(a), r(a), b.hi(a), false);
    r(a) = shrink_lower(v(a), r(a), b.lo(a), false);
  }
  return r;
}

Box3 safe_box(const Vec3& v, const Box3& b) {
  return centered_box(v, safe_box_radius(v, b));
}

SafeStrip safe_strip(const Vec3& x, const Box3& b, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw DomainError("safe_strip: alpha must be in [0,1)");
  }
  if (b.contains(x)) {
    throw DomainError("safe_strip: point must lie outside the box");
  }
  const Vec3 gap = (x - closest_point(x, b)).cwiseAbs();
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (gap(a) > gap(axis)) {
      axis = a;
    }
  }
  return SafeStrip{axis, x(axis), alpha * gap(axis)};
}

Vec3 safe_region_radius(const Vec3& y, const InflatedScenario& inf,
                        double alpha) {
  if (!inf.X_o.contains(y)) {
    throw DomainError("safe_region: point must lie in the shrunk domain");
  }
  for (const Box3& u : inf.X_u) {
    if (u.contains(y)) {
      throw DomainError("safe_region: point lies in a grown obstacle");
    }
  }

  Vec3 r = safe_box_radius(y, inf.X_o);
  for (const Box3& u : inf.X_u) {
    const SafeStrip s = safe_strip(y, u, alpha);
    r(s.axis) = std::min(r(s.axis), s.half_width);
  }

  // Exact-arithmetic repair: the strip separates its obstacle in real
  // arithmetic with margin (1-alpha) * distance, but the rounded edges of
  // y +/- r can land on or past a face when that margin is sub-ulp.
  for (const Box3& u : inf.X_u) {
    const int a = safe_strip(y, u, alpha).axis;
    if (y(a) < u.lo(a)) {
      r(a) = shrink_upper(y(a), r(a), u.lo(a), true);
    } else {
      r(a) = shrink_lower(y(a), r(a), u.hi(a), true);
    }
  }

  const Box3 out = centered_box(y, r);
  if (!inf.X_o.contains(out)) {
    throw Error("safe_region: result escaped the domain");
  }
  for (const Box3& u : inf.X_u) {
    if (!out.disjoint(u)) {
      throw Error("safe_region: result meets an obstacle");
    }
  }
  return r;
}

}  // namespace reachcert
