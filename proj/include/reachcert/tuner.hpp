#pragma once

#include <cstdint>

#include "reachcert/bounds.hpp"

namespace reachcert {

struct TuneSpec {
  Vec3 weights = Vec3(15.0, 1.0, 1.0);  // on Lp, Lv, Lf
  double gain_lo = 0.1;
  double gain_hi = 30.0;
  Gains initial{10.0, 10.0, 10.0, 10.0, 0.5, 0.5};
};

struct AnnealSchedule {
  double t0 = 1.0;
  double rho = 0.95;   // temperature decay per epoch
  int iters_per_epoch = 200;
  int epochs = 100;
};

struct TuneResult {
  Gains gains;
  double objective = 0.0;
  long evaluations = 0;
  long accepted = 0;
};

// Weighted sum of the certified position, velocity, and thrust tracking
// bounds for these gains. Throws (via the bound calculus) when the gains
// do not admit the certificate, e.g. a comparison matrix loses positive
// definiteness.
double bound_objective(const Gains& gains, const PhysicalParams& phys,
                       const BoundConfig& cfg, const Vec3& weights);

// Simulated annealing over (kp, kv, kR, kw, gamma1, gamma2): Gaussian
// steps scaled by temperature and box width, reflected at the bounds,
// Metropolis acceptance, geometric cooling. Candidates that break the
// certificate are rejected. Deterministic for a fixed seed; returns the
// best point visited.
TuneResult tune(const TuneSpec& spec, const AnnealSchedule& schedule,
                const PhysicalParams& phys, const BoundConfig& cfg,
                std::uint64_t seed);

// Runs independent chains seeded from one master stream and returns the
// best result; ties keep the lowest chain index.
TuneResult tune_best_of(const TuneSpec& spec, const AnnealSchedule& schedule,
                        const PhysicalParams& phys, const BoundConfig& cfg,
                        std::uint64_t seed, int chains);

}  // namespace reachcert
