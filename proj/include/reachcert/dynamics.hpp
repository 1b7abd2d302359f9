#pragma once

#include <string>
#include <vector>

#include "reachcert/bezier.hpp"
#include "reachcert/bounds.hpp"
#include "reachcert/controller.hpp"
#include "reachcert/geometry.hpp"

namespace reachcert {

struct StateTangent {
  Vec3 dp = Vec3::Zero();
  Vec3 dv = Vec3::Zero();
  Mat3 dR = Mat3::Zero();
  Vec3 dw = Vec3::Zero();
};

StateTangent state_derivative(const QuadState& s, double f, const Vec3& tau,
                              const PhysicalParams& p);

struct SimOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-9;
  double output_rate_hz = 100.0;
  bool force = false;  // skip the initial-set membership gate
};

struct TraceSample {
  double t = 0.0;
  QuadState x;
  TrackingErrors e;
  double V1 = 0.0, V2 = 0.0, V = 0.0;
  double f = 0.0;
  double Fd3 = 0.0;
};

struct SimulationTrace {
  std::vector<TraceSample> samples;
  long accepted = 0;
  long rejected = 0;

  double total_time() const {
    return samples.empty() ? 0.0 : samples.back().t;
  }
};

// Adaptive fifth-order Runge-Kutta over the closed loop, stopping exactly
// at every output-grid time and segment boundary; the attitude block is
// re-projected onto the rotation group after each accepted step.
SimulationTrace integrate(const QuadState& x0, const PiecewiseBezier& curve,
                          const Gains& g, const PhysicalParams& p,
                          const BoundSet& bounds, const BoundConfig& cfg,
                          const SimOptions& opts = SimOptions{});

// Slack applied to the analytic envelopes when checking a floating-point
// trace: relative headroom on every limit plus absolute floors for the
// two decay envelopes, which otherwise shrink below what finite-precision
// trajectory following can reach on long horizons.
struct CertifyPolicy {
  double rel_slack = 1e-6;
  double sqrt_v_floor = 0.0;
  double v2_floor = 0.0;
};

struct CheckResult {
  std::string name;
  long violations = 0;
  // Largest (value - limit) seen; negative means satisfied throughout.
  double worst_margin = 0.0;
  double worst_time = 0.0;
};

struct CertificationReport {
  std::vector<CheckResult> checks;
  long samples = 0;
  bool pass = false;
};

// Per-sample checks of every certified envelope and the reach-avoid
// conditions; violations are tallied, never thrown.
CertificationReport certify_trace(const SimulationTrace& trace,
                                  const BoundSet& bounds,
                                  const Scenario& scenario,
                                  const CertifyPolicy& policy = CertifyPolicy{});

}  // namespace reachcert
