#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reachcert/errors.hpp"
#include "reachcert/io.hpp"
#include "reachcert/pipeline.hpp"

namespace {

using namespace reachcert;
using nlohmann::json;

PipelineConfig load_cfg(const std::string& path) {
  PipelineConfig cfg = load_pipeline_config(path);
  apply_seed_override(cfg);
  return cfg;
}

Gains need_gains(const PipelineConfig& cfg, const std::string& gains_path) {
  if (!gains_path.empty()) {
    return load_gains(gains_path);
  }
  if (cfg.have_gains) {
    return cfg.gains;
  }
  throw Error("no gains available: add them to the config, pass --gains, or "
              "run tune-gains first");
}

BoundSet compute_bounds(const Gains& g, const PhysicalParams& phys,
                        const BoundConfig& bcfg) {
  const LyapunovMatrices mats = build_matrices(g, phys, bcfg);
  const StabilityConstants consts = stability_constants(mats, g, phys, bcfg);
  return uniform_bounds(mats, consts, g, bcfg, phys);
}

json gains_json(const Gains& g) {
  return json{{"kp", g.kp},         {"kv", g.kv},
              {"kR", g.kR},         {"kw", g.kw},
              {"gamma1", g.gamma1}, {"gamma2", g.gamma2}};
}

json bounds_json(const BoundSet& b) {
  return json{{"c1", b.mats.c1},          {"c2", b.mats.c2},
              {"beta", b.consts.beta},    {"alpha0", b.consts.alpha0},
              {"alpha1", b.consts.alpha1}, {"alpha2", b.consts.alpha2},
              {"vbar2", b.v2_bar},        {"Lu", b.Lu},
              {"Lp", b.Lp},               {"Lv", b.Lv},
              {"Lf", b.Lf},               {"Fbar", b.Fbar}};
}

json report_json(const CertificationReport& rep) {
  json checks = json::array();
  for (const CheckResult& c : rep.checks) {
    checks.push_back(json{{"name", c.name},
                          {"violations", c.violations},
                          {"worst_margin", c.worst_margin},
                          {"worst_time", c.worst_time}});
  }
  return json{{"pass", rep.pass}, {"samples", rep.samples},
              {"checks", checks}};
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

SimulationTrace trace_from_rows(const std::vector<TraceRow>& rows) {
  SimulationTrace trace;
  for (const TraceRow& r : rows) {
    TraceSample s;
    s.t = r.t;
    s.x = r.x;
    // Only the error norms are persisted; rebuild vectors of equal norm.
    s.e.e_p = Vec3(r.ep, 0.0, 0.0);
    s.e.e_v = Vec3(r.ev, 0.0, 0.0);
    s.V1 = r.V1;
    s.V2 = r.V2;
    s.V = r.V;
    s.f = r.f;
    s.Fd3 = r.Fd3;
    trace.samples.push_back(s);
  }
  return trace;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified quadrotor reach-avoid planning and tracking"};
  app.require_subcommand(1);
  int exit_code = 0;

  std::string tg_config = "configs/reference.json";
  std::uint64_t tg_seed = 0;
  int tg_chains = 0;
  std::string tg_out;
  auto* tg = app.add_subcommand(
      "tune-gains", "anneal controller gains against the certified bounds");
  tg->add_option("--config", tg_config, "pipeline config file")
      ->capture_default_str();
  auto* tg_seed_opt = tg->add_option("--seed", tg_seed, "master seed");
  auto* tg_chains_opt =
      tg->add_option("--chains", tg_chains, "independent chains, best kept");
  tg->add_option("--out", tg_out, "also write the gains JSON here");
  tg->callback([&] {
    PipelineConfig cfg = load_cfg(tg_config);
    const Scenario sc = load_scenario(cfg.scenario_path);
    BoundConfig bcfg = cfg.bound_cfg;
    bcfg.a_max = sc.a_max;
    const std::uint64_t seed =
        tg_seed_opt->count() > 0 ? tg_seed : cfg.tune_seed;
    const int chains = tg_chains_opt->count() > 0 ? tg_chains : cfg.tune_chains;
    const TuneResult r =
        tune_best_of(cfg.tune_spec, cfg.schedule, cfg.phys, bcfg, seed, chains);
    std::cout << gains_json(r.gains).dump(2) << '\n';
    if (!tg_out.empty()) {
      save_gains(tg_out, r.gains);
    }
    std::cerr << "objective " << r.objective << " after " << r.evaluations
              << " evaluations (" << r.accepted << " accepted)\n";
  });

  std::string bd_config = "configs/reference.json";
  std::string bd_gains;
  std::string bd_out;
  auto* bd = app.add_subcommand(
      "bounds", "compute the certified tracking bounds for a gain set");
  bd->add_option("--config", bd_config, "pipeline config file")
      ->capture_default_str();
  bd->add_option("--gains", bd_gains, "gains JSON (default: config gains)");
  bd->add_option("--out", bd_out, "also write the bounds JSON here");
  bd->callback([&] {
    PipelineConfig cfg = load_cfg(bd_config);
    const Scenario sc = load_scenario(cfg.scenario_path);
    BoundConfig bcfg = cfg.bound_cfg;
    bcfg.a_max = sc.a_max;
    const Gains g = need_gains(cfg, bd_gains);
    const BoundSet b = compute_bounds(g, cfg.phys, bcfg);
    std::cout << bounds_json(b).dump(2) << '\n';
    if (!bd_out.empty()) {
      save_bound_set(bd_out, b);
    }
    if (!thrust_compatible(b, cfg.phys, bcfg, sc.f_max)) {
      std::cerr << "warning: thrust ceiling " << b.Fbar
                << " N exceeds the actuator limit " << sc.f_max << " N\n";
      exit_code = 1;
    }
  });

  std::string pt_config = "configs/reference.json";
  std::string pt_gains;
  std::string pt_bounds;
  std::string pt_out = "tube.json";
  std::uint64_t pt_seed = 0;
  int pt_nv = 0;
  double pt_alpha = 0.0;
  double pt_csample = 0.0;
  auto* pt = app.add_subcommand("plan-tube",
                                "grow a safe-box tree and extract a tube");
  pt->add_option("--config", pt_config, "pipeline config file")
      ->capture_default_str();
  pt->add_option("--gains", pt_gains, "gains JSON (default: config gains)");
  pt->add_option("--bounds", pt_bounds,
                 "bounds JSON (default: computed from gains)");
  pt->add_option("--out", pt_out, "tube output path")->capture_default_str();
  auto* pt_seed_opt = pt->add_option("--seed", pt_seed, "sampler seed");
  auto* pt_nv_opt = pt->add_option("--n-vertices", pt_nv, "vertex budget");
  auto* pt_alpha_opt =
      pt->add_option("--alpha", pt_alpha, "obstacle strip fraction");
  auto* pt_cs_opt = pt->add_option("--c-sample", pt_csample,
                                   "fraction of free-space-biased samples");
  pt->callback([&] {
    PipelineConfig cfg = load_cfg(pt_config);
    const Scenario sc = load_scenario(cfg.scenario_path);
    BoundConfig bcfg = cfg.bound_cfg;
    bcfg.a_max = sc.a_max;
    const BoundSet b = pt_bounds.empty()
                           ? compute_bounds(need_gains(cfg, pt_gains),
                                            cfg.phys, bcfg)
                           : load_bound_set(pt_bounds);
    RrtParams params = cfg.rrt;
    if (pt_seed_opt->count() > 0) {
      params.seed = pt_seed;
    }
    if (pt_nv_opt->count() > 0) {
      params.n_vertices = pt_nv;
    }
    if (pt_alpha_opt->count() > 0) {
      params.alpha = pt_alpha;
    }
    if (pt_cs_opt->count() > 0) {
      params.c_sample = pt_csample;
    }
    const InflatedScenario inflated = inflate_scenario(sc, b.Lp);
    const RrtTree tree = build_rrt(inflated, params);
    if (!tree.success()) {
      std::cerr << "planning failed: " << tree.vertices.size()
                << " vertices, none in the target\n";
      exit_code = 1;
      return;
    }
    const SafeTube tube = extract_tube(tree, inflated, params);
    save_tube(pt_out, tube);
    std::cerr << "tube with " << tube.waypoints.size() << " waypoints ("
              << tree.vertices.size() << " tree vertices, "
              << tree.samples_drawn << " samples) -> " << pt_out << '\n';
  });

  std::string st_config = "configs/reference.json";
  std::string st_tube;
  std::string st_bounds;
  std::string st_out = "trajectory.json";
  double st_t0 = 10.0;
  double st_alpha_t = 1.1;
  int st_np = 14;
  double st_eps = 1e-6;
  int st_max_outer = 60;
  bool st_rest = false;
  auto* st = app.add_subcommand("synth-traj",
                                "fit a piecewise Bezier curve through a tube");
  st->add_option("--config", st_config, "pipeline config file")
      ->capture_default_str();
  st->add_option("--tube", st_tube, "tube JSON")->required();
  st->add_option("--bounds", st_bounds, "bounds JSON")->required();
  st->add_option("--out", st_out, "trajectory output path")
      ->capture_default_str();
  auto* st_t0_opt =
      st->add_option("--t0", st_t0, "initial horizon, s")->capture_default_str();
  auto* st_at_opt = st->add_option("--alpha-t", st_alpha_t,
                                   "horizon growth factor")
                        ->capture_default_str();
  auto* st_np_opt =
      st->add_option("--np", st_np, "Bezier degree")->capture_default_str();
  auto* st_eps_opt = st->add_option("--eps", st_eps,
                                    "vertical thrust floor margin, N")
                         ->capture_default_str();
  auto* st_mo_opt = st->add_option("--max-outer", st_max_outer,
                                   "horizon growth attempts")
                        ->capture_default_str();
  st->add_flag("--terminal-rest", st_rest,
               "pin zero velocity and acceleration at the end");
  st->callback([&] {
    PipelineConfig cfg = load_cfg(st_config);
    const Scenario sc = load_scenario(cfg.scenario_path);
    BoundConfig bcfg = cfg.bound_cfg;
    bcfg.a_max = sc.a_max;
    const SafeTube tube = load_tube(st_tube);
    const BoundSet b = load_bound_set(st_bounds);
    SynthParams params = cfg.synth;
    if (st_t0_opt->count() > 0) {
      params.t0 = st_t0;
    }
    if (st_at_opt->count() > 0) {
      params.alpha_t = st_alpha_t;
    }
    if (st_np_opt->count() > 0) {
      params.degree = st_np;
    }
    if (st_eps_opt->count() > 0) {
      params.eps = st_eps;
    }
    if (st_mo_opt->count() > 0) {
      params.max_outer_iters = st_max_outer;
    }
    params.terminal_rest = params.terminal_rest || st_rest;
    const SynthResult syn = synthesize(tube, b, sc, bcfg, cfg.phys, params);
    if (!syn.success) {
      std::cerr << "synthesis failed after " << syn.outer_iters
                << " horizons up to "
                << (syn.attempted_horizons.empty()
                        ? params.t0
                        : syn.attempted_horizons.back())
                << " s\n";
      exit_code = 1;
      return;
    }
    save_curve(st_out, syn.curve);
    const DenseReport dense = verify_trajectory(syn.curve, syn.tube, b, sc,
                                                bcfg, cfg.phys);
    std::cerr << "feasible at T = " << syn.horizon << " s after "
              << syn.outer_iters << " horizon(s); dense verification "
              << (dense.pass ? "clean" : "FAILED") << " over " << dense.points
              << " points -> " << st_out << '\n';
    if (!dense.pass) {
      exit_code = 1;
    }
  });

  std::string sm_config = "configs/reference.json";
  std::string sm_gains;
  std::string sm_traj;
  std::string sm_outdir = "out";
  int sm_traces = 0;
  std::uint64_t sm_seed = 0;
  auto* sm = app.add_subcommand(
      "simulate", "track a trajectory from sampled initial states");
  sm->add_option("--config", sm_config, "pipeline config file")
      ->capture_default_str();
  sm->add_option("--gains", sm_gains, "gains JSON (default: config gains)");
  sm->add_option("--trajectory", sm_traj, "trajectory JSON")->required();
  sm->add_option("--out-dir", sm_outdir, "trace output directory")
      ->capture_default_str();
  auto* sm_traces_opt = sm->add_option("--traces", sm_traces, "trace count");
  auto* sm_seed_opt = sm->add_option("--seed", sm_seed, "sampling seed");
  sm->callback([&] {
    PipelineConfig cfg = load_cfg(sm_config);
    const Scenario sc = load_scenario(cfg.scenario_path);
    BoundConfig bcfg = cfg.bound_cfg;
    bcfg.a_max = sc.a_max;
    const Gains g = need_gains(cfg, sm_gains);
    const BoundSet b = compute_bounds(g, cfg.phys, bcfg);
    const PiecewiseBezier curve = load_curve(sm_traj);
    const int traces =
        sm_traces_opt->count() > 0 ? sm_traces : cfg.traces;
    const std::uint64_t seed =
        sm_seed_opt->count() > 0 ? sm_seed : cfg.sim_seed;
    std::filesystem::create_directories(sm_outdir);
    DesiredState desired0;
    desired0.p = sc.p0;
    desired0.v = sc.v0;
    const std::vector<InitSample> starts = sample_members(
        g, cfg.phys, bcfg, desired0, InitRecipe::FullState, traces, seed);
    json reports = json::array();
    bool all_pass = true;
    for (std::size_t k = 0; k < starts.size(); ++k) {
      const SimulationTrace trace =
          integrate(starts[k].state, curve, g, cfg.phys, b, bcfg, cfg.sim);
      const CertificationReport rep =
          certify_trace(trace, b, sc, cfg.certify);
      char name[32];
      std::snprintf(name, sizeof(name), "trace_%02zu.csv", k);
      save_trace_csv(sm_outdir + "/" + name, trace);
      json r = report_json(rep);
      r["index"] = k;
      r["file"] = name;
      reports.push_back(r);
      all_pass = all_pass && rep.pass;
    }
    std::cout << reports.dump(2) << '\n';
    std::cerr << starts.size() << " traces -> " << sm_outdir << '\n';
    if (!all_pass) {
      exit_code = 1;
    }
  });

  std::string si_config = "configs/reference.json";
  std::string si_gains;
  std::string si_recipe = "position";
  std::string si_out;
  int si_n = 10000;
  std::uint64_t si_seed = 0;
  auto* si = app.add_subcommand(
      "sample-init", "map an initial-set recipe by rejection-free sampling");
  si->add_option("--config", si_config, "pipeline config file")
      ->capture_default_str();
  si->add_option("--gains", si_gains, "gains JSON (default: config gains)");
  si->add_option("--recipe", si_recipe, "position or attitude")
      ->capture_default_str();
  si->add_option("-n,--samples", si_n, "sample count")->capture_default_str();
  auto* si_seed_opt = si->add_option("--seed", si_seed, "sampling seed");
  si->add_option("--out", si_out, "CSV output path (default: stdout)");
  si->callback([&] {
    PipelineConfig cfg = load_cfg(si_config);
    const Scenario sc = load_scenario(cfg.scenario_path);
    BoundConfig bcfg = cfg.bound_cfg;
    bcfg.a_max = sc.a_max;
    const Gains g = need_gains(cfg, si_gains);
    InitRecipe recipe;
    if (si_recipe == "position") {
      recipe = InitRecipe::PositionOnly;
    } else if (si_recipe == "attitude") {
      recipe = InitRecipe::AttitudeOnly;
    } else {
      throw Error("--recipe must be position or attitude");
    }
    const std::uint64_t seed =
        si_seed_opt->count() > 0 ? si_seed : cfg.sim_seed;
    DesiredState desired0;
    desired0.p = sc.p0;
    desired0.v = sc.v0;
    const std::vector<InitSample> samples = sample_initial_set(
        g, cfg.phys, bcfg, desired0, recipe, si_n, seed);
    std::string out = "d1,d2,d3,member,psi0,erot0,V1_0\n";
    long members = 0;
    for (const InitSample& s : samples) {
      const Vec3 d = recipe == InitRecipe::PositionOnly ? s.dp : s.dr;
      for (int i = 0; i < 3; ++i) {
        append_double(out, d(i));
        out.push_back(',');
      }
      out.push_back(s.member ? '1' : '0');
      members += s.member ? 1 : 0;
      for (double v : {s.psi0, s.rot_energy0, s.v1_0}) {
        out.push_back(',');
        append_double(out, v);
      }
      out.push_back('\n');
    }
    if (si_out.empty()) {
      std::cout << out;
    } else {
      std::ofstream f(si_out);
      if (!f) {
        throw Error("cannot write " + si_out);
      }
      f << out;
    }
    std::cerr << members << "/" << samples.size() << " members\n";
  });

  std::string ct_config = "configs/reference.json";
  std::string ct_bounds;
  std::string ct_gains;
  std::string ct_trace;
  auto* ct = app.add_subcommand("certify",
                                "re-check a saved trace against the bounds");
  ct->add_option("--config", ct_config, "pipeline config file")
      ->capture_default_str();
  ct->add_option("--bounds", ct_bounds,
                 "bounds JSON (default: computed from gains)");
  ct->add_option("--gains", ct_gains, "gains JSON (default: config gains)");
  ct->add_option("--trace", ct_trace, "trace CSV")->required();
  ct->callback([&] {
    PipelineConfig cfg = load_cfg(ct_config);
    const Scenario sc = load_scenario(cfg.scenario_path);
    BoundConfig bcfg = cfg.bound_cfg;
    bcfg.a_max = sc.a_max;
    const BoundSet b = ct_bounds.empty()
                           ? compute_bounds(need_gains(cfg, ct_gains),
                                            cfg.phys, bcfg)
                           : load_bound_set(ct_bounds);
    const SimulationTrace trace = trace_from_rows(load_trace_csv(ct_trace));
    const CertificationReport rep = certify_trace(trace, b, sc, cfg.certify);
    std::cout << report_json(rep).dump(2) << '\n';
    if (!rep.pass) {
      exit_code = 1;
    }
  });

  std::string ra_config = "configs/reference.json";
  std::string ra_outdir;
  auto* ra = app.add_subcommand("run-all",
                                "tune, bound, plan, synthesize, simulate,"
                                " certify");
  ra->add_option("--config", ra_config, "pipeline config file")
      ->capture_default_str();
  ra->add_option("--out-dir", ra_outdir, "artifact directory override");
  ra->callback([&] {
    PipelineConfig cfg = load_cfg(ra_config);
    if (!ra_outdir.empty()) {
      cfg.out_dir = ra_outdir;
    }
    const PipelineResult r = run_pipeline(cfg);
    if (!r.failed_stage.empty()) {
      std::cerr << "stage " << r.failed_stage << " failed: " << r.message
                << '\n';
      exit_code = 1;
      return;
    }
    std::cout << "gains: kp=" << r.gains.kp << " kv=" << r.gains.kv
              << " kR=" << r.gains.kR << " kw=" << r.gains.kw
              << " gamma1=" << r.gains.gamma1 << " gamma2=" << r.gains.gamma2
              << '\n';
    std::cout << "bounds: Lp=" << r.bounds.Lp << " Lv=" << r.bounds.Lv
              << " Lf=" << r.bounds.Lf << " Fbar=" << r.bounds.Fbar << '\n';
    std::cout << "trajectory: T=" << r.horizon << " s\n";
    std::cout << "traces: " << r.trace_count << " certified, "
              << r.violations << " violations\n";
    std::cout << (r.pass ? "PASS" : "FAIL") << " (artifacts in " << cfg.out_dir
              << ")\n";
    if (!r.pass) {
      exit_code = 1;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return exit_code;
}
