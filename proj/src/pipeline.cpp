#include "reachcert/pipeline.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string_view>

#include <json.hpp>

#include "reachcert/errors.hpp"
#include "reachcert/io.hpp"
#include "reachcert/rng.hpp"

namespace reachcert {

namespace {

using nlohmann::json;

Vec3 cube_draw(SplitMix64& rng) {
  Vec3 u;
  for (int i = 0; i < 3; ++i) {
    u(i) = rng.uniform(-1.0, 1.0);
  }
  return u;
}

InitSample draw_one(SplitMix64& rng, const Gains& gains,
                    const PhysicalParams& phys, const BoundConfig& cfg,
                    const LyapunovMatrices& mats, const DesiredState& desired0,
                    InitRecipe recipe) {
  InitSample s;
  switch (recipe) {
    case InitRecipe::PositionOnly:
      s.dp = 0.21 * cube_draw(rng);
      break;
    case InitRecipe::AttitudeOnly:
      s.dr = 0.1 * cube_draw(rng);
      break;
    case InitRecipe::FullState:
      s.dp = 0.3 * cube_draw(rng);
      s.dv = 0.3 * cube_draw(rng);
      s.dr = 0.5 * cube_draw(rng);
      s.w = cube_draw(rng);
      break;
  }

  // The desired frame at t = 0 follows from the sampled position and
  // velocity errors; attitude-coupled quantities then close the loop.
  const Vec3 e_p = s.dp;
  const Vec3 e_v = s.dv;
  const Vec3 F_d = desired_force(e_p, e_v, desired0.a, gains, phys);
  DesiredState d = desired0;
  d.R = desired_attitude(F_d);

  s.state.p = desired0.p + s.dp;
  s.state.v = desired0.v + s.dv;
  s.state.R = d.R * exp_so3(s.dr);

  const Vec3 b3 = s.state.R.col(2);
  const Vec3 delta_f = F_d.dot(b3) * b3 - F_d;
  d.w = desired_rate(F_d, force_rate(e_p, e_v, delta_f, desired0.j, gains,
                                     phys));

  if (recipe == InitRecipe::FullState) {
    s.state.w = s.w;
  } else {
    // Zero body-rate error: w = R^T R_d w_d.
    s.state.w = s.state.R.transpose() * d.R * d.w;
    s.w = s.state.w;
  }

  const TrackingErrors e = tracking_errors(s.state, d);
  const double v1 = eval_V1(e.e_p, e.e_v, mats);
  const InitialSetReport rep =
      initial_set_check(e.psi, e.e_w, v1, gains, phys, cfg);
  s.member = rep.member;
  s.psi0 = rep.psi0;
  s.rot_energy0 = rep.rot_energy0;
  s.v1_0 = rep.v1_0;
  return s;
}

Vec3 vec_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(where + ": expected an array of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    v(i) = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

double get_num(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j[key].get<double>() : fallback;
}

std::uint64_t get_seed(const json& j, const char* key, std::uint64_t fallback) {
  return j.contains(key) ? j[key].get<std::uint64_t>() : fallback;
}

Gains gains_from(const json& j) {
  Gains g;
  g.kp = j.at("kp").get<double>();
  g.kv = j.at("kv").get<double>();
  g.kR = j.at("kR").get<double>();
  g.kw = j.at("kw").get<double>();
  g.gamma1 = j.at("gamma1").get<double>();
  g.gamma2 = j.at("gamma2").get<double>();
  return g;
}

json check_json(const std::string& name, long violations, double worst_margin,
                double worst_time) {
  return json{{"name", name},
              {"violations", violations},
              {"worst_margin", worst_margin},
              {"worst_time", worst_time}};
}

}  // namespace

std::vector<InitSample> sample_initial_set(const Gains& gains,
                                           const PhysicalParams& phys,
                                           const BoundConfig& cfg,
                                           const DesiredState& desired0,
                                           InitRecipe recipe, int n,
                                           std::uint64_t seed) {
  if (n < 1) {
    throw DomainError("sample_initial_set: n must be at least 1");
  }
  const LyapunovMatrices mats = build_matrices(gains, phys, cfg);
  SplitMix64 rng(seed);
  std::vector<InitSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.push_back(draw_one(rng, gains, phys, cfg, mats, desired0, recipe));
  }
  return out;
}

std::vector<InitSample> sample_members(const Gains& gains,
                                       const PhysicalParams& phys,
                                       const BoundConfig& cfg,
                                       const DesiredState& desired0,
                                       InitRecipe recipe, int count,
                                       std::uint64_t seed, long max_draws) {
  if (count < 1) {
    throw DomainError("sample_members: count must be at least 1");
  }
  const LyapunovMatrices mats = build_matrices(gains, phys, cfg);
  SplitMix64 rng(seed);
  std::vector<InitSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long draws = 0; draws < max_draws; ++draws) {
    InitSample s =
        draw_one(rng, gains, phys, cfg, mats, desired0, recipe);
    if (s.member) {
      out.push_back(std::move(s));
      if (static_cast<int>(out.size()) == count) {
        return out;
      }
    }
  }
  throw Error("sample_members: draw budget exhausted before finding " +
              std::to_string(count) + " members");
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open " + path);
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }

  PipelineConfig cfg;
  cfg.scenario_path = j.at("scenario").get<std::string>();

  const json& phys = j.at("physical");
  cfg.phys.m = phys.at("m").get<double>();
  cfg.phys.g = get_num(phys, "g", 9.81);
  const json& inertia = phys.at("J");
  if (inertia.is_array() && inertia.size() == 3 && inertia[0].is_number()) {
    cfg.phys.J = Vec3(inertia[0].get<double>(), inertia[1].get<double>(),
                      inertia[2].get<double>())
                     .asDiagonal();
  } else if (inertia.is_array() && inertia.size() == 3) {
    for (int r = 0; r < 3; ++r) {
      const Vec3 row = vec_from(inertia[static_cast<std::size_t>(r)],
                                path + ": physical.J row");
      cfg.phys.J.row(r) = row.transpose();
    }
  } else {
    throw Error(path + ": physical.J must be 3 numbers or a 3x3 matrix");
  }

  const json& bc = j.at("bounds");
  cfg.bound_cfg.psi_bar = bc.at("psi_bar").get<double>();
  cfg.bound_cfg.alpha_psi = bc.at("alpha_psi").get<double>();
  cfg.bound_cfg.v1_bar = bc.at("v1_bar").get<double>();
  cfg.bound_cfg.eps = get_num(bc, "eps", 1e-6);

  if (j.contains("gains")) {
    cfg.have_gains = true;
    cfg.gains = gains_from(j["gains"]);
  }
  if (j.contains("tune")) {
    const json& t = j["tune"];
    if (t.contains("weights")) {
      cfg.tune_spec.weights = vec_from(t["weights"], path + ": tune.weights");
    }
    cfg.tune_spec.gain_lo = get_num(t, "gain_lo", cfg.tune_spec.gain_lo);
    cfg.tune_spec.gain_hi = get_num(t, "gain_hi", cfg.tune_spec.gain_hi);
    if (t.contains("initial")) {
      cfg.tune_spec.initial = gains_from(t["initial"]);
    }
    cfg.schedule.t0 = get_num(t, "t0", cfg.schedule.t0);
    cfg.schedule.rho = get_num(t, "rho", cfg.schedule.rho);
    cfg.schedule.iters_per_epoch = t.contains("iters_per_epoch")
                                       ? t["iters_per_epoch"].get<int>()
                                       : cfg.schedule.iters_per_epoch;
    cfg.schedule.epochs =
        t.contains("epochs") ? t["epochs"].get<int>() : cfg.schedule.epochs;
    cfg.tune_seed = get_seed(t, "seed", cfg.tune_seed);
    cfg.tune_chains = t.contains("chains") ? t["chains"].get<int>() : 1;
  }
  if (j.contains("rrt")) {
    const json& r = j["rrt"];
    cfg.rrt.n_vertices = r.contains("n_vertices") ? r["n_vertices"].get<int>()
                                                  : cfg.rrt.n_vertices;
    cfg.rrt.c_sample = get_num(r, "c_sample", cfg.rrt.c_sample);
    cfg.rrt.alpha = get_num(r, "alpha", cfg.rrt.alpha);
    cfg.rrt.seed = get_seed(r, "seed", cfg.rrt.seed);
  }
  if (j.contains("synth")) {
    const json& s = j["synth"];
    cfg.synth.t0 = get_num(s, "t0", cfg.synth.t0);
    cfg.synth.alpha_t = get_num(s, "alpha_t", cfg.synth.alpha_t);
    cfg.synth.max_outer_iters = s.contains("max_outer_iters")
                                    ? s["max_outer_iters"].get<int>()
                                    : cfg.synth.max_outer_iters;
    cfg.synth.eps = get_num(s, "eps", cfg.synth.eps);
    cfg.synth.degree =
        s.contains("np") ? s["np"].get<int>() : cfg.synth.degree;
    cfg.synth.terminal_rest = s.contains("terminal_rest")
                                  ? s["terminal_rest"].get<bool>()
                                  : cfg.synth.terminal_rest;
  }
  if (j.contains("sim")) {
    const json& s = j["sim"];
    cfg.sim.rel_tol = get_num(s, "rel_tol", cfg.sim.rel_tol);
    cfg.sim.abs_tol = get_num(s, "abs_tol", cfg.sim.abs_tol);
    cfg.sim.output_rate_hz =
        get_num(s, "output_rate_hz", cfg.sim.output_rate_hz);
    cfg.traces = s.contains("traces") ? s["traces"].get<int>() : cfg.traces;
    cfg.sim_seed = get_seed(s, "seed", cfg.sim_seed);
  }
  if (j.contains("certify")) {
    const json& c = j["certify"];
    cfg.certify.rel_slack = get_num(c, "rel_slack", cfg.certify.rel_slack);
    cfg.certify.sqrt_v_floor =
        get_num(c, "sqrt_v_floor", cfg.certify.sqrt_v_floor);
    cfg.certify.v2_floor = get_num(c, "v2_floor", cfg.certify.v2_floor);
  }
  if (j.contains("out_dir")) {
    cfg.out_dir = j["out_dir"].get<std::string>();
  }
  return cfg;
}

void apply_seed_override(PipelineConfig& cfg) {
  const char* env = std::getenv("REACHCERT_SEED");
  if (env == nullptr) {
    return;
  }
  std::uint64_t seed = 0;
  const char* end = env + std::string_view(env).size();
  const auto res = std::from_chars(env, end, seed);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error("REACHCERT_SEED is not an unsigned integer");
  }
  cfg.tune_seed = seed;
  cfg.rrt.seed = seed;
  cfg.sim_seed = seed;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  PipelineResult result;
  auto fail = [&](const char* stage, const std::string& message) {
    result.failed_stage = stage;
    result.message = message;
    return result;
  };

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) {
    return fail("setup", "cannot create " + cfg.out_dir + ": " + ec.message());
  }
  auto artifact = [&](const std::string& name) {
    return cfg.out_dir + "/" + name;
  };

  Scenario scenario;
  try {
    scenario = load_scenario(cfg.scenario_path);
  } catch (const std::exception& e) {
    return fail("scenario", e.what());
  }
  BoundConfig bcfg = cfg.bound_cfg;
  bcfg.a_max = scenario.a_max;

  try {
    if (cfg.have_gains) {
      result.gains = cfg.gains;
    } else {
      result.gains = tune_best_of(cfg.tune_spec, cfg.schedule, cfg.phys, bcfg,
                                  cfg.tune_seed, cfg.tune_chains)
                         .gains;
    }
    save_gains(artifact("gains.json"), result.gains);
  } catch (const std::exception& e) {
    return fail("tune", e.what());
  }

  try {
    const LyapunovMatrices mats = build_matrices(result.gains, cfg.phys, bcfg);
    const StabilityConstants consts =
        stability_constants(mats, result.gains, cfg.phys, bcfg);
    result.bounds = uniform_bounds(mats, consts, result.gains, bcfg, cfg.phys);
    if (!thrust_compatible(result.bounds, cfg.phys, bcfg, scenario.f_max)) {
      throw InfeasibleError(
          "certified thrust ceiling exceeds the actuator limit");
    }
    save_bound_set(artifact("bounds.json"), result.bounds);
  } catch (const std::exception& e) {
    return fail("bounds", e.what());
  }

  SafeTube tube;
  try {
    const InflatedScenario inflated =
        inflate_scenario(scenario, result.bounds.Lp);
    const RrtTree tree = build_rrt(inflated, cfg.rrt);
    if (!tree.success()) {
      throw Error("no vertex reached the target within the vertex budget");
    }
    tube = extract_tube(tree, inflated, cfg.rrt);
    save_tube(artifact("tube.json"), tube);
  } catch (const std::exception& e) {
    return fail("plan", e.what());
  }

  SynthResult syn;
  try {
    syn = synthesize(tube, result.bounds, scenario, bcfg, cfg.phys, cfg.synth);
    if (!syn.success) {
      throw InfeasibleError("no feasible horizon within max_outer_iters");
    }
    save_curve(artifact("trajectory.json"), syn.curve);
    result.horizon = syn.horizon;
  } catch (const std::exception& e) {
    return fail("synthesize", e.what());
  }

  DenseReport dense;
  try {
    dense = verify_trajectory(syn.curve, syn.tube, result.bounds, scenario,
                              bcfg, cfg.phys);
  } catch (const std::exception& e) {
    return fail("verify", e.what());
  }

  json trace_reports = json::array();
  bool traces_pass = true;
  try {
    DesiredState desired0;
    desired0.p = scenario.p0;
    desired0.v = scenario.v0;
    const std::vector<InitSample> starts =
        sample_members(result.gains, cfg.phys, bcfg, desired0,
                       InitRecipe::FullState, cfg.traces, cfg.sim_seed);
    for (std::size_t k = 0; k < starts.size(); ++k) {
      const SimulationTrace trace =
          integrate(starts[k].state, syn.curve, result.gains, cfg.phys,
                    result.bounds, bcfg, cfg.sim);
      const CertificationReport rep =
          certify_trace(trace, result.bounds, scenario, cfg.certify);
      char name[32];
      std::snprintf(name, sizeof(name), "trace_%02zu.csv", k);
      save_trace_csv(artifact(name), trace);
      json checks = json::array();
      for (const CheckResult& c : rep.checks) {
        checks.push_back(
            check_json(c.name, c.violations, c.worst_margin, c.worst_time));
        result.violations += c.violations;
      }
      trace_reports.push_back(json{{"index", k},
                                   {"file", name},
                                   {"samples", rep.samples},
                                   {"pass", rep.pass},
                                   {"checks", checks}});
      traces_pass = traces_pass && rep.pass;
      ++result.trace_count;
    }
  } catch (const std::exception& e) {
    return fail("simulate", e.what());
  }

  json dense_checks = json::array();
  for (const DenseCheck& c : dense.checks) {
    dense_checks.push_back(
        check_json(c.name, c.violations, c.worst_margin, c.worst_time));
  }
  result.pass = dense.pass && traces_pass;
  const json report{{"pass", result.pass},
                    {"trajectory", json{{"pass", dense.pass},
                                        {"points", dense.points},
                                        {"checks", dense_checks}}},
                    {"traces", trace_reports}};
  try {
    std::ofstream out(artifact("report.json"));
    if (!out) {
      throw Error("cannot write report.json");
    }
    out << report.dump(2) << '\n';
  } catch (const std::exception& e) {
    return fail("report", e.what());
  }
  return result;
}

}  // namespace reachcert
