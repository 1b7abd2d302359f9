#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "reachcert/errors.hpp"

namespace reachcert {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat36 = Eigen::Matrix<double, 3, 6>;

// hat(v) w = v x w.
inline Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

// Inverse of hat on skew-symmetric matrices. The input must be skew within
// 1e-9 entrywise; anything farther off is a caller bug, not roundoff.
inline Vec3 vee(const Mat3& a) {
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw DomainError("vee: input is not skew-symmetric within 1e-9");
  }
  return Vec3(a(2, 1), a(0, 2), a(1, 0));
}

// Rodrigues exponential. Below theta = 1e-8 the sin(theta)/theta and
// (1-cos theta)/theta^2 factors switch to their series limits, avoiding
// cancellation; the omitted terms are O(theta^4) < 1e-32.
inline Mat3 exp_so3(const Vec3& v) {
  const double th2 = v.squaredNorm();
  const double th = std::sqrt(th2);
  double a, b;
  if (th < 1e-8) {
    a = 1.0 - th2 / 6.0;
    b = 0.5 - th2 / 24.0;
  } else {
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / th2;
  }
  const Mat3 k = hat(v);
  return Mat3::Identity() + a * k + b * (k * k);
}

// Proper-rotation test: R'R = I and det R = 1, both within tol entrywise.
inline bool is_rotation(const Mat3& r, double tol = 1e-9) {
  if ((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) {
    return false;
  }
  return std::abs(r.determinant() - 1.0) <= tol;
}

// Nearest rotation by Newton iteration toward the polar factor,
// R <- (R + R^-T)/2, run until R'R drifts from I by less than 1e-12.
// Converges quadratically for inputs near SO(3); used to absorb
// integration drift, not to orthonormalize arbitrary matrices.
inline Mat3 project_rotation(Mat3 r) {
  for (int it = 0; it < 100; ++it) {
    const double drift =
        (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (drift < 1e-12) {
      return r;
    }
    r = 0.5 * (r + r.transpose().inverse());
  }
  throw DomainError("project_rotation: no convergence; input is far from SO(3)");
}

}  // namespace reachcert
