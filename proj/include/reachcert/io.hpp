#pragma once

#include <string>
#include <vector>

#include "reachcert/bezier.hpp"
#include "reachcert/bounds.hpp"
#include "reachcert/dynamics.hpp"
#include "reachcert/geometry.hpp"
#include "reachcert/tube.hpp"

namespace reachcert {

// File helpers. JSON artifacts reload to values equal to what was saved;
// numbers are written with shortest round-trip precision, so re-saving a
// loaded artifact reproduces the bytes. Parse and validation failures
// throw Error with the offending path in the message.

// Schema: {operating_domain:{lo,hi}, obstacles:[{lo,hi}], target:{lo,hi},
//          p0, v0, v_max, f_max, a_max}, vectors as [x, y, z].
Scenario load_scenario(const std::string& path);
void save_scenario(const std::string& path, const Scenario& sc);

// Flat object with kp, kv, kR, kw, gamma1, gamma2.
Gains load_gains(const std::string& path);
void save_gains(const std::string& path, const Gains& g);

// Scalar summary: c1, c2, beta, alpha0, alpha1, alpha2, vbar2, Lu, Lp,
// Lv, Lf, Fbar. The comparison matrices are not persisted; a loaded set
// carries zero matrices and serves consumers that read only the scalars
// (planning, synthesis). Rebuild from gains when the quadratic forms are
// needed.
BoundSet load_bound_set(const std::string& path);
void save_bound_set(const std::string& path, const BoundSet& b);

// Ordered array of {waypoint:[x,y,z], radius:[rx,ry,rz]}.
SafeTube load_tube(const std::string& path);
void save_tube(const std::string& path, const SafeTube& t);

// {segments:[{duration, control_points:[[x,y,z],...]}]}.
PiecewiseBezier load_curve(const std::string& path);
void save_curve(const std::string& path, const PiecewiseBezier& c);

// CSV with header t,px,py,pz,vx,vy,vz,r11,...,r33,wx,wy,wz,ep,ev,V1,V2,
// V,f,Fd3 where ep and ev are the tracking-error norms.
void save_trace_csv(const std::string& path, const SimulationTrace& trace);

struct TraceRow {
  double t = 0.0;
  QuadState x;
  double ep = 0.0;
  double ev = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
  double V = 0.0;
  double f = 0.0;
  double Fd3 = 0.0;
};
std::vector<TraceRow> load_trace_csv(const std::string& path);

}  // namespace reachcert
