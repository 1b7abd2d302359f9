#pragma once

// Randomized property suites shared between the unit tests and the
// acceptance runner. Each suite draws its own instances from a seed and
// reports case/failure counts plus the worst violation margin it saw
// (negative margins mean the property held with room to spare).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "reachcert/bounds.hpp"
#include "reachcert/controller.hpp"
#include "reachcert/geometry.hpp"
#include "reachcert/rng.hpp"
#include "reachcert/so3.hpp"
#include "reachcert/spd.hpp"

#include "oracles.hpp"

namespace testutil {

using reachcert::Box3;

struct SuiteResult {
  long cases = 0;
  long failures = 0;
  double worst = -std::numeric_limits<double>::infinity();

  void bump(double margin) {
    ++cases;
    worst = std::max(worst, margin);
    if (margin > 0.0) {
      ++failures;
    }
  }

  void bump_exact(bool ok) { bump(ok ? -1.0 : 1.0); }

  SuiteResult& merge(const SuiteResult& other) {
    cases += other.cases;
    failures += other.failures;
    worst = std::max(worst, other.worst);
    return *this;
  }
};

// Rayleigh quotient bounds and the norm transfer through M^{1/2}:
//   (a) lmin(M) |x|^2 <= x'Mx <= lmax(M) |x|^2
//   (b) lmin(M^-1/2 W M^-1/2) |M^1/2 x|^2 <= x'Wx <= lmax(...) |M^1/2 x|^2
//   (c) |Ax| <= |A M^-1/2| |M^1/2 x|
inline SuiteResult quadratic_form_suite(long cases, std::uint64_t seed) {
  SuiteResult r;
  SplitMix64 rng(seed);
  for (long i = 0; i < cases; ++i) {
    const int n = (i % 2 == 0) ? 6 : 3;
    const Eigen::MatrixXd m = random_spd(rng, n, 1e4);
    const Eigen::MatrixXd w = random_spd(rng, n, 1e4);
    Eigen::VectorXd x(n);
    for (int k = 0; k < n; ++k) {
      x(k) = 3.0 * rng.normal();
    }

    const auto [mlo, mhi] = reachcert::sym_eig_bounds(m);
    const double qm = x.dot(m * x);
    const double xx = x.squaredNorm();
    const double scale_a = std::max(1.0, mhi * xx);
    double margin = (mlo * xx - qm) / scale_a;
    margin = std::max(margin, (qm - mhi * xx) / scale_a);

    const Eigen::MatrixXd mis = reachcert::spd_inv_sqrt(m);
    const Eigen::MatrixXd msq = reachcert::spd_sqrt(m);
    const auto [wlo, whi] =
        reachcert::sym_eig_bounds(mis * w * mis);
    const double qw = x.dot(w * x);
    const double mx = (msq * x).squaredNorm();
    const double scale_b = std::max(1.0, std::abs(whi) * mx);
    margin = std::max(margin, (wlo * mx - qw) / scale_b);
    margin = std::max(margin, (qw - whi * mx) / scale_b);

    Eigen::MatrixXd a(3, n);
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < n; ++q) {
        a(p, q) = rng.normal();
      }
    }
    const double lhs = (a * x).norm();
    const double rhs =
        reachcert::induced_norm2(a * mis) * (msq * x).norm();
    margin = std::max(margin, (lhs - rhs) / std::max(1.0, rhs));

    r.bump(margin - 1e-9);
  }
  return r;
}

// Hat-map algebra: antisymmetry, the cross product, the trace pairing,
// the similarity transport and the trace-shift identity.
inline SuiteResult hat_identity_suite(long cases, std::uint64_t seed) {
  SuiteResult r;
  SplitMix64 rng(seed);
  for (long i = 0; i < cases; ++i) {
    const Vec3 x = random_vec(rng, 3.0);
    const Vec3 y = random_vec(rng, 3.0);
    Mat3 a;
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < 3; ++q) {
        a(p, q) = 3.0 * rng.normal();
      }
    }
    const Mat3 rot = random_rotation(rng);

    const Mat3 hx = reachcert::hat(x);
    double err = (hx.transpose() + hx).norm();
    err = std::max(err, (hx * y - x.cross(y)).norm());
    err = std::max(err, (hx * y + reachcert::hat(y) * x).norm());
    const double tr_lhs = (a * hx).trace();
    const double tr_rhs = -x.dot(reachcert::vee(a - a.transpose()));
    err = std::max(err, std::abs(tr_lhs - tr_rhs));
    const Mat3 shift_lhs = hx * a + a.transpose() * hx;
    const Mat3 shift_rhs = reachcert::hat((a.trace() * Mat3::Identity() - a) * x);
    err = std::max(err, (shift_lhs - shift_rhs).norm());
    err = std::max(err, (rot * hx * rot.transpose() - reachcert::hat(rot * x)).norm());

    const double scale = std::max(1.0, x.norm() * std::max(y.norm(), a.norm()));
    r.bump(err / scale - 1e-12);
  }
  return r;
}

// Rodrigues map against the raw power series, including angles far below
// the implementation's small-angle switch.
inline SuiteResult exp_map_suite(long cases, std::uint64_t seed) {
  SuiteResult r;
  SplitMix64 rng(seed);
  for (long i = 0; i < cases; ++i) {
    double angle;
    if (i % 10 == 0) {
      angle = rng.uniform(0.0, 1e-7);
    } else {
      angle = rng.uniform(0.0, M_PI);
    }
    const Vec3 v = angle * random_unit(rng);
    const Mat3 got = reachcert::exp_so3(v);
    const Mat3 want = exp_series(v);
    r.bump((got - want).norm() - 1e-13);
  }
  return r;
}

// The scalar comparison bound of the envelope lemma against an RK4
// integration of the equality dynamics.
inline SuiteResult envelope_ode_suite(long cases, std::uint64_t seed) {
  SuiteResult r;
  SplitMix64 rng(seed);
  for (long i = 0; i < cases; ++i) {
    reachcert::StabilityConstants c;
    c.beta = rng.uniform(0.05, 3.0);
    c.alpha0 = (i % 10 == 0) ? 2.0 * c.beta : rng.uniform(0.1, 4.0);
    c.alpha1 = rng.uniform(0.0, 4.0);
    c.alpha2 = rng.uniform(0.0, 5.0);
    const double x = rng.uniform(0.0, 3.0);
    const double y = rng.uniform(0.01, 3.0);
    const double worst =
        bernoulli_worst_margin(x, y, c, 2.0, 2000);
    r.bump(worst - 1e-6);
  }
  return r;
}

// Spectral norm of the attitude-error transport matrix stays within one.
inline SuiteResult transport_norm_suite(long cases, std::uint64_t seed) {
  SuiteResult r;
  SplitMix64 rng(seed);
  for (long i = 0; i < cases; ++i) {
    const Mat3 rot = random_rotation(rng);
    const Mat3 rot_d = random_rotation(rng);
    const Mat3 c = reachcert::error_rate_matrix(rot, rot_d);
    const double norm =
        Eigen::JacobiSVD<Mat3>(c).singularValues()(0);
    r.bump(norm - 1.0 - 1e-9);
  }
  return r;
}

// |e_R|^2 = Psi (2 - Psi), the unconditional half bound, and the
// conditional upper bound at the ceiling psi = 1.9.
inline SuiteResult attitude_error_suite(long cases, std::uint64_t seed) {
  SuiteResult r;
  SplitMix64 rng(seed);
  const double psi_cap = 1.9;
  for (long i = 0; i < cases; ++i) {
    const Mat3 rot = random_rotation(rng);
    const Mat3 rot_d = random_rotation(rng);
    reachcert::QuadState s;
    s.R = rot;
    reachcert::DesiredState d;
    d.R = rot_d;
    const reachcert::TrackingErrors e = reachcert::tracking_errors(s, d);
    const double n2 = e.e_R.squaredNorm();

    double margin = std::abs(n2 - e.psi * (2.0 - e.psi)) - 1e-10;
    margin = std::max(margin, 0.5 * n2 - e.psi - 1e-10);
    if (e.psi <= psi_cap) {
      margin = std::max(margin, e.psi - n2 / (2.0 - psi_cap) - 1e-10);
    }
    r.bump(margin);
  }
  return r;
}

// Thrust-direction mismatch against the attitude error, at the ceiling
// psi = 1.9: |(b3d . b3) b3 - b3d| <= sqrt(2/(2-psi)) |e_R|.
inline SuiteResult thrust_direction_suite(long cases, std::uint64_t seed) {
  SuiteResult r;
  SplitMix64 rng(seed);
  const double psi_cap = 1.9;
  const double factor = std::sqrt(2.0 / (2.0 - psi_cap));
  for (long i = 0; i < cases;) {
    const Mat3 rot = random_rotation(rng);
    const Mat3 rot_d = random_rotation(rng);
    reachcert::QuadState s;
    s.R = rot;
    reachcert::DesiredState d;
    d.R = rot_d;
    const reachcert::TrackingErrors e = reachcert::tracking_errors(s, d);
    if (e.psi > psi_cap) {
      continue;
    }
    const Vec3 b3 = rot.col(2);
    const Vec3 b3d = rot_d.col(2);
    const double lhs = (b3d.dot(b3) * b3 - b3d).norm();
    r.bump(lhs - factor * e.e_R.norm() - 1e-10);
    ++i;
  }
  return r;
}

inline Box3 random_box(SplitMix64& rng, double span = 10.0) {
  Vec3 a = random_vec(rng, span);
  Vec3 b = random_vec(rng, span);
  for (int k = 0; k < 3; ++k) {
    if (a(k) > b(k)) {
      std::swap(a(k), b(k));
    }
    if (b(k) - a(k) < 1e-3) {
      b(k) += 1e-3;
    }
  }
  return Box3{a, b};
}

inline Vec3 random_in_box(SplitMix64& rng, const Box3& b) {
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    v(k) = rng.uniform(b.lo(k), b.hi(k));
  }
  return v;
}

// Componentwise clamp against a brute-force grid in the infinity norm.
inline SuiteResult closest_point_suite(long cases, std::uint64_t seed,
                                       int grid = 8) {
  SuiteResult r;
  SplitMix64 rng(seed);
  for (long i = 0; i < cases; ++i) {
    const Box3 b = random_box(rng);
    const Vec3 x = (i % 3 == 0) ? random_in_box(rng, b) : random_vec(rng, 15.0);
    const Vec3 cp = reachcert::closest_point(x, b);

    if (!b.contains(cp)) {
      r.bump_exact(false);
      continue;
    }
    const double best = (x - cp).lpNorm<Eigen::Infinity>();
    double margin = -1.0;
    for (int gi = 0; gi < grid && margin <= 0.0; ++gi) {
      for (int gj = 0; gj < grid && margin <= 0.0; ++gj) {
        for (int gk = 0; gk < grid; ++gk) {
          const Vec3 g(
              b.lo(0) + (b.hi(0) - b.lo(0)) * gi / (grid - 1.0),
              b.lo(1) + (b.hi(1) - b.lo(1)) * gj / (grid - 1.0),
              b.lo(2) + (b.hi(2) - b.lo(2)) * gk / (grid - 1.0));
          const double d = (x - g).lpNorm<Eigen::Infinity>();
          if (best > d + 1e-12) {
            margin = best - d;
            break;
          }
        }
      }
    }
    r.bump(margin);
  }
  return r;
}

// The largest centered box around an interior point stays inside its
// parent box, exactly, and still contains the point.
inline SuiteResult safe_box_suite(long cases, std::uint64_t seed) {
  SuiteResult r;
  SplitMix64 rng(seed);
  for (long i = 0; i < cases; ++i) {
    const Box3 b = random_box(rng);
    const Vec3 v = random_in_box(rng, b);
    const Box3 region = reachcert::safe_box(v, b);
    const bool ok = b.contains(region) && region.contains(v) &&
                    (region.lo.array() <= region.hi.array()).all();
    r.bump_exact(ok);
  }
  return r;
}

// Strip around an exterior point: the axis attains the infinity-norm gap,
// the width scales by alpha, and the strip interval misses the box.
inline SuiteResult safe_strip_suite(long cases, std::uint64_t seed) {
  SuiteResult r;
  SplitMix64 rng(seed);
  for (long i = 0; i < cases;) {
    const Box3 b = random_box(rng);
    const Vec3 x = random_vec(rng, 15.0);
    if (b.contains(x)) {
      continue;
    }
    const Vec3 gap = (x - reachcert::closest_point(x, b)).cwiseAbs();
    if (gap.maxCoeff() < 1e-3) {
      continue;  // keep the separation margin clear of rounding
    }
    const double alpha = rng.uniform(0.0, 0.99);
    const reachcert::SafeStrip s = reachcert::safe_strip(x, b, alpha);

    bool ok = s.axis >= 0 && s.axis < 3;
    for (int a = 0; ok && a < 3; ++a) {
      if (gap(a) > gap(s.axis)) {
        ok = false;
      }
      if (a < s.axis && gap(a) >= gap(s.axis)) {
        ok = false;  // ties resolve to the lowest axis
      }
    }
    ok = ok && std::abs(s.half_width - alpha * gap(s.axis)) <=
                   1e-15 * std::max(1.0, gap(s.axis));
    ok = ok && (s.center - s.half_width > b.hi(s.axis) ||
                s.center + s.half_width < b.lo(s.axis));
    r.bump_exact(ok);
    ++i;
  }
  return r;
}

// Full safe-region construction on randomized scenarios: the box contains
// its seed point, stays inside the shrunk domain and misses every grown
// obstacle, all in exact comparisons.
inline SuiteResult safe_region_suite(long cases, std::uint64_t seed) {
  SuiteResult r;
  SplitMix64 rng(seed);
  for (long i = 0; i < cases;) {
    reachcert::InflatedScenario inf;
    inf.X_o = random_box(rng, 6.0);
    const int n_obs = static_cast<int>(rng.next() % 7);
    for (int k = 0; k < n_obs; ++k) {
      const Vec3 c = random_in_box(rng, inf.X_o);
      Vec3 half;
      for (int a = 0; a < 3; ++a) {
        half(a) = rng.uniform(1e-3, 2.0);
      }
      inf.X_u.push_back(Box3{c - half, c + half});
    }

    Vec3 y = random_in_box(rng, inf.X_o);
    bool free = true;
    for (const Box3& u : inf.X_u) {
      if (u.contains(y)) {
        free = false;
        break;
      }
    }
    if (!free) {
      continue;
    }

    const double alpha = rng.uniform(0.0, 0.99);
    const Box3 region = reachcert::safe_region(y, inf, alpha);
    bool ok = region.contains(y) && inf.X_o.contains(region);
    for (const Box3& u : inf.X_u) {
      ok = ok && region.disjoint(u);
    }
    r.bump_exact(ok);
    ++i;
  }
  return r;
}

}  // namespace testutil
