#include "reachcert/bezier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "reachcert/errors.hpp"

namespace reachcert {

namespace {

// Stable all-at-once Bernstein basis row (de Casteljau recurrence).
void basis_row(int n, double u, double* out) {
  out[0] = 1.0;
  const double w = 1.0 - u;
  for (int i = 1; i <= n; ++i) {
    double carry = 0.0;
    for (int j = 0; j < i; ++j) {
      const double tmp = out[j];
      out[j] = carry + w * tmp;
      carry = u * tmp;
    }
    out[i] = carry;
  }
}

}  // namespace

double PiecewiseBezier::total_time() const {
  return std::accumulate(durations.begin(), durations.end(), 0.0);
}

std::vector<double> PiecewiseBezier::knots() const {
  std::vector<double> t(durations.size() + 1, 0.0);
  for (std::size_t i = 0; i < durations.size(); ++i) {
    t[i + 1] = t[i] + durations[i];
  }
  return t;
}

void validate(const PiecewiseBezier& curve) {
  if (curve.degree < 4) {
    throw DomainError("PiecewiseBezier: degree must be at least 4");
  }
  if (curve.durations.empty() ||
      curve.durations.size() != curve.control_points.size()) {
    throw DomainError("PiecewiseBezier: durations/control point blocks mismatch");
  }
  for (const double d : curve.durations) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw DomainError("PiecewiseBezier: segment durations must be positive");
    }
  }
  for (const auto& block : curve.control_points) {
    if (block.cols() != curve.degree + 1) {
      throw DomainError("PiecewiseBezier: control point block has wrong size");
    }
  }
}

double bernstein(int i, int n, double t) {
  if (n < 0 || i < 0 || i > n) {
    throw DomainError("bernstein: index out of range");
  }
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("bernstein: parameter outside [0,1]");
  }
  double binom = 1.0;
  for (int k = 1; k <= std::min(i, n - i); ++k) {
    binom = binom * static_cast<double>(n - k + 1) / static_cast<double>(k);
  }
  return binom * std::pow(t, i) * std::pow(1.0 - t, n - i);
}

Vec3 eval(const PiecewiseBezier& curve, double t, int order) {
  if (order < 0 || order > 4) {
    throw DomainError("eval: derivative order must be in [0;4]");
  }
  const double total = curve.total_time();
  if (!(t >= 0.0 && t <= total)) {
    throw DomainError("eval: time outside [0,T]");
  }
  const int n = curve.degree;
  if (order > n) {
    return Vec3::Zero();
  }

  // Right-continuous segment choice; t = T falls to the last segment.
  int s = 0;
  double local = t;
  const int last = curve.num_segments() - 1;
  while (s < last && local >= curve.durations[s]) {
    local -= curve.durations[s];
    ++s;
  }
  const double delta = curve.durations[s];
  const double u = std::clamp(local / delta, 0.0, 1.0);

  Eigen::Matrix3Xd d = curve.control_points[s];
  double factor = 1.0;
  for (int k = 0; k < order; ++k) {
    const int cols = static_cast<int>(d.cols()) - 1;
    d.leftCols(cols) = d.rightCols(cols) - d.leftCols(cols);
    d.conservativeResize(Eigen::NoChange, cols);
    factor *= static_cast<double>(n - k) / delta;
  }

  std::vector<double> b(static_cast<std::size_t>(n - order) + 1);
  basis_row(n - order, u, b.data());
  Vec3 out = Vec3::Zero();
  for (int j = 0; j <= n - order; ++j) {
    out += b[static_cast<std::size_t>(j)] * d.col(j);
  }
  return factor * out;
}

CurveSample sample(const PiecewiseBezier& curve, double t) {
  return CurveSample{eval(curve, t, 0), eval(curve, t, 1), eval(curve, t, 2),
                     eval(curve, t, 3), eval(curve, t, 4)};
}

// Constraint tally for N_s segments of degree N_p:
//   equalities:   12 + 15 (N_s - 1)            (+6 with terminal rest)
//   inequalities: 6 N_s (N_p + 1)              box containment
//               + 6 N_s N_p                    velocity envelope
//               + 6 N_s (N_p - 1)              specific-force envelope
//               +   N_s (N_p - 1)              vertical thrust floor
//               + 6                            terminal box
LpProblem assemble(const SafeTube& tube, const BoundSet& bounds,
                   const Scenario& scenario, const BoundConfig& cfg,
                   const PhysicalParams& phys,
                   const std::vector<double>& durations, int degree,
                   bool terminal_rest) {
  const int ns = tube.segments();
  const int np = degree;
  if (ns < 1 || static_cast<int>(durations.size()) != ns) {
    throw DomainError("assemble: durations do not match the tube segments");
  }
  if (tube.radii.size() != tube.waypoints.size()) {
    throw DomainError("assemble: tube waypoint/radius mismatch");
  }
  if (np < 4) {
    throw DomainError("assemble: degree must be at least 4");
  }
  for (const double d : durations) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw DomainError("assemble: durations must be positive");
    }
  }

  LpProblem lp;
  lp.num_vars = 3 * ns * (np + 1);
  auto var = [&](int s, int j, int a) { return control_var(s, j, a, np); };
  auto eq = [&](std::vector<std::pair<int, double>> terms, double rhs) {
    lp.eq.push_back(LpRow{std::move(terms), rhs});
  };
  auto le = [&](std::vector<std::pair<int, double>> terms, double rhs) {
    lp.le.push_back(LpRow{std::move(terms), rhs});
  };

  // Initial position and velocity plus vanishing initial acceleration and
  // jerk pin the first four control points outright, so the synthesized
  // curve meets the start conditions to machine precision rather than to
  // solver tolerance.
  for (int a = 0; a < 3; ++a) {
    const double c0 = tube.waypoints[0](a);
    const double c1 = c0 + durations[0] * scenario.v0(a) / np;
    eq({{var(0, 0, a), 1.0}}, c0);
    eq({{var(0, 1, a), 1.0}}, c1);
    eq({{var(0, 2, a), 1.0}}, 2.0 * c1 - c0);
    eq({{var(0, 3, a), 1.0}}, 3.0 * c1 - 2.0 * c0);
  }

  // Junction continuity through the fourth derivative.
  for (int s = 0; s + 1 < ns; ++s) {
    const double dl = durations[s], dr = durations[s + 1];
    for (int a = 0; a < 3; ++a) {
      eq({{var(s, np, a), 1.0}, {var(s + 1, 0, a), -1.0}}, 0.0);
      eq({{var(s, np, a), 1.0 / dl},
          {var(s, np - 1, a), -1.0 / dl},
          {var(s + 1, 1, a), -1.0 / dr},
          {var(s + 1, 0, a), 1.0 / dr}},
         0.0);
      const double l2 = 1.0 / (dl * dl), r2 = 1.0 / (dr * dr);
      eq({{var(s, np, a), l2},
          {var(s, np - 1, a), -2.0 * l2},
          {var(s, np - 2, a), l2},
          {var(s + 1, 2, a), -r2},
          {var(s + 1, 1, a), 2.0 * r2},
          {var(s + 1, 0, a), -r2}},
         0.0);
      const double l3 = l2 / dl, r3 = r2 / dr;
      eq({{var(s, np, a), l3},
          {var(s, np - 1, a), -3.0 * l3},
          {var(s, np - 2, a), 3.0 * l3},
          {var(s, np - 3, a), -l3},
          {var(s + 1, 3, a), -r3},
          {var(s + 1, 2, a), 3.0 * r3},
          {var(s + 1, 1, a), -3.0 * r3},
          {var(s + 1, 0, a), r3}},
         0.0);
      const double l4 = l3 / dl, r4 = r3 / dr;
      eq({{var(s, np, a), l4},
          {var(s, np - 1, a), -4.0 * l4},
          {var(s, np - 2, a), 6.0 * l4},
          {var(s, np - 3, a), -4.0 * l4},
          {var(s, np - 4, a), l4},
          {var(s + 1, 4, a), -r4},
          {var(s + 1, 3, a), 4.0 * r4},
          {var(s + 1, 2, a), -6.0 * r4},
          {var(s + 1, 1, a), 4.0 * r4},
          {var(s + 1, 0, a), -r4}},
         0.0);
    }
  }

  if (terminal_rest) {
    const int s = ns - 1;
    for (int a = 0; a < 3; ++a) {
      eq({{var(s, np, a), 1.0}, {var(s, np - 1, a), -1.0}}, 0.0);
      eq({{var(s, np, a), 1.0},
          {var(s, np - 1, a), -2.0},
          {var(s, np - 2, a), 1.0}},
         0.0);
    }
  }

  // Per-segment box containment (absorbed into variable bounds downstream).
  for (int s = 0; s < ns; ++s) {
    for (int j = 0; j <= np; ++j) {
      for (int a = 0; a < 3; ++a) {
        const double c = tube.waypoints[s](a), r = tube.radii[s](a);
        le({{var(s, j, a), 1.0}}, c + r);
        le({{var(s, j, a), -1.0}}, -(c - r));
      }
    }
  }

  // Velocity envelope, shrunk by the tracking-error bound.
  for (int s = 0; s < ns; ++s) {
    const double k = np / durations[s];
    for (int j = 0; j < np; ++j) {
      for (int a = 0; a < 3; ++a) {
        const double lim = scenario.v_max(a) - bounds.Lv;
        le({{var(s, j + 1, a), k}, {var(s, j, a), -k}}, lim);
        le({{var(s, j + 1, a), -k}, {var(s, j, a), k}}, lim);
      }
    }
  }

  // Specific-force envelope |g e3 + accel| <= a_max and the vertical
  // thrust floor m accel_3 >= Lf - m g + eps.
  const double floor_rhs = bounds.Lf - phys.m * phys.g + cfg.eps;
  for (int s = 0; s < ns; ++s) {
    const double k2 =
        static_cast<double>(np) * (np - 1) / (durations[s] * durations[s]);
    for (int j = 0; j + 2 <= np; ++j) {
      for (int a = 0; a < 3; ++a) {
        const double shift = a == 2 ? phys.g : 0.0;
        le({{var(s, j, a), k2},
            {var(s, j + 1, a), -2.0 * k2},
            {var(s, j + 2, a), k2}},
           scenario.a_max(a) - shift);
        le({{var(s, j, a), -k2},
            {var(s, j + 1, a), 2.0 * k2},
            {var(s, j + 2, a), -k2}},
           scenario.a_max(a) + shift);
      }
      le({{var(s, j, 2), -phys.m * k2},
          {var(s, j + 1, 2), 2.0 * phys.m * k2},
          {var(s, j + 2, 2), -phys.m * k2}},
         -floor_rhs);
    }
  }

  // Terminal box.
  for (int a = 0; a < 3; ++a) {
    const double c = tube.waypoints[ns](a), r = tube.radii[ns](a);
    le({{var(ns - 1, np, a), 1.0}}, c + r);
    le({{var(ns - 1, np, a), -1.0}}, -(c - r));
  }

  return lp;
}

}  // namespace reachcert
