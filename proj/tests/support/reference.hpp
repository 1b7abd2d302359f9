#pragma once

// The benchmark quadrotor and gain set most tests exercise.

#include "reachcert/bounds.hpp"
#include "reachcert/so3.hpp"

namespace testutil {

inline reachcert::Gains reference_gains() {
  return reachcert::Gains{18.5058, 5.6704, 23.5537, 1.4309, 0.55, 0.6047};
}

inline reachcert::PhysicalParams reference_phys() {
  reachcert::PhysicalParams p;
  p.m = 4.34;
  p.J = reachcert::Vec3(0.0820, 0.0845, 0.1377).asDiagonal();
  p.g = 9.81;
  return p;
}

inline reachcert::BoundConfig reference_cfg() {
  reachcert::BoundConfig c;
  c.psi_bar = 0.005;
  c.alpha_psi = 0.4;
  c.v1_bar = 0.4;
  c.a_max = reachcert::Vec3(1.0, 1.0, 10.0);
  c.eps = 1e-6;
  return c;
}

inline reachcert::BoundSet reference_bounds() {
  const auto gains = reference_gains();
  const auto phys = reference_phys();
  const auto cfg = reference_cfg();
  const auto mats = reachcert::build_matrices(gains, phys, cfg);
  const auto consts = reachcert::stability_constants(mats, gains, phys, cfg);
  return reachcert::uniform_bounds(mats, consts, gains, cfg, phys);
}

}  // namespace testutil
