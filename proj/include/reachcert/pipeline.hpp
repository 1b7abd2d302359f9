#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reachcert/bounds.hpp"
#include "reachcert/controller.hpp"
#include "reachcert/dynamics.hpp"
#include "reachcert/synth.hpp"
#include "reachcert/tube.hpp"
#include "reachcert/tuner.hpp"

namespace reachcert {

enum class InitRecipe { PositionOnly, AttitudeOnly, FullState };

// One draw from an initial-set recipe: the perturbations applied, the
// assembled state, and where it landed relative to the certified initial
// set.
struct InitSample {
  Vec3 dp = Vec3::Zero();  // position offset
  Vec3 dv = Vec3::Zero();  // velocity offset
  Vec3 dr = Vec3::Zero();  // attitude offset, rotation log
  Vec3 w = Vec3::Zero();   // body rate
  QuadState state;
  bool member = false;
  double psi0 = 0.0;
  double rot_energy0 = 0.0;
  double v1_0 = 0.0;
};

// Draws n samples around the reference start desired0 (position, velocity,
// acceleration, jerk at t = 0). PositionOnly offsets position by
// 0.21*[-1,1]^3 with attitude and rates matched to the controller's
// desired values; AttitudeOnly rotates away from the desired attitude by
// exp(0.1*[-1,1]^3); FullState perturbs position and velocity by
// 0.3*[-1,1]^3 each, sets the attitude to exp(0.5*[-1,1]^3) about the
// desired one, and draws body rates from [-1,1]^3. Membership is the
// three-part initial-set test.
std::vector<InitSample> sample_initial_set(const Gains& gains,
                                           const PhysicalParams& phys,
                                           const BoundConfig& cfg,
                                           const DesiredState& desired0,
                                           InitRecipe recipe, int n,
                                           std::uint64_t seed);

// Rejection-samples the same recipe until count members are found.
std::vector<InitSample> sample_members(const Gains& gains,
                                       const PhysicalParams& phys,
                                       const BoundConfig& cfg,
                                       const DesiredState& desired0,
                                       InitRecipe recipe, int count,
                                       std::uint64_t seed,
                                       long max_draws = 10'000'000);

struct PipelineConfig {
  std::string scenario_path;
  PhysicalParams phys;
  BoundConfig bound_cfg;  // a_max is overwritten from the scenario
  bool have_gains = false;
  Gains gains;
  TuneSpec tune_spec;
  AnnealSchedule schedule;
  std::uint64_t tune_seed = 1;
  int tune_chains = 1;
  RrtParams rrt;
  SynthParams synth;
  SimOptions sim;
  CertifyPolicy certify;
  int traces = 20;
  std::uint64_t sim_seed = 11;
  std::string out_dir = "out";
};

PipelineConfig load_pipeline_config(const std::string& path);

// REACHCERT_SEED, when set, replaces every seed in the config.
void apply_seed_override(PipelineConfig& cfg);

struct PipelineResult {
  bool pass = false;
  std::string failed_stage;  // empty when every stage completed
  std::string message;
  Gains gains;
  BoundSet bounds;
  double horizon = 0.0;
  int trace_count = 0;
  long violations = 0;
};

// tune -> bounds -> plan -> synthesize -> verify -> simulate. Writes
// gains.json, bounds.json, tube.json, trajectory.json, trace_NN.csv, and
// report.json under cfg.out_dir. pass is true iff the dense trajectory
// verifier and every per-trace certification report are clean; a stage
// that cannot complete sets failed_stage and message instead of throwing.
PipelineResult run_pipeline(const PipelineConfig& cfg);

}  // namespace reachcert
