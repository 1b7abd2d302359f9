#include "reachcert/tuner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "reachcert/errors.hpp"
#include "reachcert/rng.hpp"

namespace reachcert {

namespace {

constexpr double kGammaMargin = 1e-6;

std::array<double, 6> to_array(const Gains& g) {
  return {g.kp, g.kv, g.kR, g.kw, g.gamma1, g.gamma2};
}

Gains to_gains(const std::array<double, 6>& x) {
  return Gains{x[0], x[1], x[2], x[3], x[4], x[5]};
}

double reflect(double x, double lo, double hi) {
  const double span = hi - lo;
  for (int i = 0; i < 64 && (x < lo || x > hi); ++i) {
    if (x > hi) {
      x = hi - (x - hi);
    }
    if (x < lo) {
      x = lo + (lo - x);
    }
  }
  if (x < lo || x > hi) {
    x = lo + 0.5 * span;  // pathological step, recenter
  }
  return x;
}

}  // namespace

double bound_objective(const Gains& gains, const PhysicalParams& phys,
                       const BoundConfig& cfg, const Vec3& weights) {
  const LyapunovMatrices mats = build_matrices(gains, phys, cfg);
  const StabilityConstants consts = stability_constants(mats, gains, phys, cfg);
  const BoundSet bounds = uniform_bounds(mats, consts, gains, cfg, phys);
  const double value =
      weights(0) * bounds.Lp + weights(1) * bounds.Lv + weights(2) * bounds.Lf;
  if (!std::isfinite(value)) {
    throw DomainError("bound_objective: non-finite objective");
  }
  return value;
}

TuneResult tune(const TuneSpec& spec, const AnnealSchedule& schedule,
                const PhysicalParams& phys, const BoundConfig& cfg,
                std::uint64_t seed) {
  if (!(spec.gain_lo > 0.0) || !(spec.gain_hi > spec.gain_lo)) {
    throw DomainError("tune: need 0 < gain_lo < gain_hi");
  }
  if (!(schedule.t0 > 0.0) || !(schedule.rho > 0.0) || !(schedule.rho < 1.0)) {
    throw DomainError("tune: need t0 > 0 and rho in (0, 1)");
  }
  if (schedule.iters_per_epoch < 1 || schedule.epochs < 1) {
    throw DomainError("tune: need at least one iteration and one epoch");
  }

  const std::array<double, 6> lo = {spec.gain_lo,  spec.gain_lo,
                                    spec.gain_lo,  spec.gain_lo,
                                    kGammaMargin,  kGammaMargin};
  const std::array<double, 6> hi = {spec.gain_hi,       spec.gain_hi,
                                    spec.gain_hi,       spec.gain_hi,
                                    1.0 - kGammaMargin, 1.0 - kGammaMargin};

  SplitMix64 rng(seed);
  TuneResult result;

  std::array<double, 6> cur = to_array(spec.initial);
  for (int i = 0; i < 6; ++i) {
    cur[i] = std::clamp(cur[i], lo[i], hi[i]);
  }
  ++result.evaluations;
  double cur_value = bound_objective(to_gains(cur), phys, cfg, spec.weights);

  std::array<double, 6> best = cur;
  double best_value = cur_value;

  for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
    const double temp = schedule.t0 * std::pow(schedule.rho, epoch);
    for (int it = 0; it < schedule.iters_per_epoch; ++it) {
      std::array<double, 6> cand = cur;
      for (int i = 0; i < 6; ++i) {
        const double step = 0.1 * temp * (hi[i] - lo[i]) * rng.normal();
        cand[i] = reflect(cand[i] + step, lo[i], hi[i]);
      }
      ++result.evaluations;
      double cand_value = std::numeric_limits<double>::infinity();
      try {
        cand_value = bound_objective(to_gains(cand), phys, cfg, spec.weights);
      } catch (const Error&) {
        continue;  // certificate broke down at the candidate, reject
      }
      const double delta = cand_value - cur_value;
      if (delta <= 0.0 || rng.uniform01() < std::exp(-delta / temp)) {
        cur = cand;
        cur_value = cand_value;
        ++result.accepted;
        if (cur_value < best_value) {
          best = cur;
          best_value = cur_value;
        }
      }
    }
  }

  result.gains = to_gains(best);
  result.objective = best_value;
  return result;
}

TuneResult tune_best_of(const TuneSpec& spec, const AnnealSchedule& schedule,
                        const PhysicalParams& phys, const BoundConfig& cfg,
                        std::uint64_t seed, int chains) {
  if (chains < 1) {
    throw DomainError("tune_best_of: need at least one chain");
  }
  SplitMix64 master(seed);
  TuneResult best;
  bool have = false;
  long evaluations = 0;
  long accepted = 0;
  for (int c = 0; c < chains; ++c) {
    const std::uint64_t chain_seed = master.next();
    TuneResult r = tune(spec, schedule, phys, cfg, chain_seed);
    evaluations += r.evaluations;
    accepted += r.accepted;
    if (!have || r.objective < best.objective) {
      best = r;
      have = true;
    }
  }
  best.evaluations = evaluations;
  best.accepted = accepted;
  return best;
}

}  // namespace reachcert
