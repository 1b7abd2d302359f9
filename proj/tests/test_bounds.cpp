#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reachcert/bounds.hpp"
#include "reachcert/errors.hpp"
#include "reachcert/so3.hpp"
#include "reachcert/spd.hpp"

#include "support/lemmas.hpp"
#include "support/oracles.hpp"
#include "support/reference.hpp"

using namespace reachcert;

namespace {

// Benchmark values computed once in 50-digit arithmetic and frozen here.
constexpr double kC1 = 2.8349804503731807;
constexpr double kC2 = 0.6839910321137807;
constexpr double kBeta = 4.9348236448542255;
constexpr double kAlpha0 = 1.3064371269184598;
constexpr double kAlpha1 = 1.4591556122553614;
constexpr double kAlpha2 = 9.9728710554873849;
constexpr double kV2Bar = 0.17455938962670877;
constexpr double kTm = 0.25294536097489059;
constexpr double kLu = 0.97370012728076008;
constexpr double kLp = 0.33742857061522123;
constexpr double kLv = 0.6967723681972376;
constexpr double kLf = 6.2444824331310845;
constexpr double kFbar = 50.076333865622503;
constexpr double kMAmax = 43.831851432491418;

double rel(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace

TEST_CASE("cross coupling scalars on the benchmark gains") {
  const auto mats = build_matrices(testutil::reference_gains(),
                                   testutil::reference_phys(),
                                   testutil::reference_cfg());
  CHECK(rel(mats.c1, kC1) < 2e-15);
  CHECK(rel(mats.c2, kC2) < 2e-15);
}

TEST_CASE("coupling scalars scale linearly in their gamma") {
  auto gains = testutil::reference_gains();
  const auto phys = testutil::reference_phys();
  const auto cfg = testutil::reference_cfg();
  const double base = build_matrices(gains, phys, cfg).c1;
  gains.gamma1 = 0.11;
  const double scaled = build_matrices(gains, phys, cfg).c1;
  CHECK(rel(scaled, base * 0.11 / 0.55) < 1e-14);
}

TEST_CASE("lyapunov matrices have the documented block structure") {
  const auto g = testutil::reference_gains();
  const auto phys = testutil::reference_phys();
  const auto cfg = testutil::reference_cfg();
  const auto mats = build_matrices(g, phys, cfg);

  CHECK(mats.M1(0, 0) == doctest::Approx(g.kp / 2).epsilon(1e-15));
  CHECK(mats.M1(0, 3) == doctest::Approx(mats.c1 / 2).epsilon(1e-15));
  CHECK(mats.M1(3, 3) == doctest::Approx(phys.m / 2).epsilon(1e-15));
  CHECK(mats.M1(0, 1) == 0.0);

  CHECK(mats.W1(0, 0) == doctest::Approx(mats.c1 * g.kp / phys.m).epsilon(1e-15));
  CHECK(mats.W1(0, 3) ==
        doctest::Approx(mats.c1 * g.kv / (2 * phys.m)).epsilon(1e-15));
  CHECK(mats.W1(3, 3) == doctest::Approx(g.kv - mats.c1).epsilon(1e-15));

  CHECK(mats.M21(0, 0) == doctest::Approx(g.kR / 2).epsilon(1e-15));
  CHECK(mats.M21(3, 3) == doctest::Approx(phys.J(0, 0) / 2).epsilon(1e-15));
  CHECK(mats.M22(0, 0) ==
        doctest::Approx(g.kR / (2 - cfg.psi_bar)).epsilon(1e-15));

  CHECK(mats.W2(0, 0) ==
        doctest::Approx(mats.c2 * g.kR / phys.J(0, 0)).epsilon(1e-15));
  CHECK(mats.W2(0, 3) ==
        doctest::Approx(mats.c2 * g.kw / (2 * phys.J(0, 0))).epsilon(1e-15));
  CHECK(mats.W2(3, 3) == doctest::Approx(g.kw - mats.c2).epsilon(1e-15));
}

TEST_CASE("decay and disturbance constants on the benchmark") {
  const auto g = testutil::reference_gains();
  const auto phys = testutil::reference_phys();
  const auto cfg = testutil::reference_cfg();
  const auto mats = build_matrices(g, phys, cfg);
  const auto consts = stability_constants(mats, g, phys, cfg);
  CHECK(rel(consts.beta, kBeta) < 1e-12);
  CHECK(rel(consts.alpha0, kAlpha0) < 1e-12);
  CHECK(rel(consts.alpha1, kAlpha1) < 1e-12);
  CHECK(rel(consts.alpha2, kAlpha2) < 1e-12);
}

TEST_CASE("moderate gain draws yield finite positive certificates") {
  SplitMix64 rng(23);
  for (int i = 0; i < 100; ++i) {
    Gains g;
    g.kp = rng.uniform(2.0, 30.0);
    g.kv = rng.uniform(2.0, 30.0);
    g.kR = rng.uniform(2.0, 30.0);
    g.kw = rng.uniform(2.0, 30.0);
    g.gamma1 = rng.uniform(0.1, 0.9);
    g.gamma2 = rng.uniform(0.1, 0.9);
    PhysicalParams phys;
    phys.m = rng.uniform(1.0, 8.0);
    phys.J = testutil::random_spd(rng, 3, 5.0, rng.uniform(0.05, 0.2));
    BoundConfig cfg;
    cfg.psi_bar = rng.uniform(1e-3, 0.5);
    cfg.alpha_psi = rng.uniform(0.05, 0.95);
    cfg.v1_bar = rng.uniform(1e-3, 1.0);
    cfg.a_max = Vec3(rng.uniform(0.5, 5.0), rng.uniform(0.5, 5.0),
                     rng.uniform(1.0, 12.0));

    const auto mats = build_matrices(g, phys, cfg);
    CHECK(mats.c1 < g.kv);
    CHECK(mats.c2 < g.kw);
    CHECK(sym_eig_bounds(mats.M1).first > 0.0);
    CHECK(sym_eig_bounds(mats.W1).first > 0.0);
    CHECK(sym_eig_bounds(mats.M21).first > 0.0);
    CHECK(sym_eig_bounds(mats.M22).first > 0.0);
    CHECK(sym_eig_bounds(mats.W2).first > 0.0);

    const auto consts = stability_constants(mats, g, phys, cfg);
    CHECK(consts.beta > 0.0);
    CHECK(consts.alpha0 > 0.0);
    CHECK(consts.alpha0 <= 2.0 * consts.beta * (1.0 + 1e-12));
    CHECK(std::isfinite(consts.alpha1));
    CHECK(std::isfinite(consts.alpha2));

    const auto bounds = uniform_bounds(mats, consts, g, cfg, phys);
    CHECK(std::isfinite(bounds.Lu));
    CHECK(bounds.Lu > 0.0);
    CHECK(bounds.Lp > 0.0);
    CHECK(bounds.Lv > 0.0);
    CHECK(bounds.Lf > 0.0);
    CHECK(bounds.Fbar == doctest::Approx(bounds.Lf + phys.m * cfg.a_max.norm())
                             .epsilon(1e-15));
  }
}

TEST_CASE("an overflowing certificate still fails thrust compatibility") {
  // Slow attitude decay with a large energy ceiling pushes the envelope
  // prefactor past double range; the bounds come back infinite rather
  // than throwing, and every downstream feasibility gate rejects them.
  Gains g{30.0, 30.0, 30.0, 30.0, 0.9, 0.9};
  PhysicalParams phys;
  phys.m = 0.6;
  phys.J = Vec3(0.01, 0.012, 0.02).asDiagonal();
  BoundConfig cfg;
  cfg.psi_bar = 1.9;
  cfg.alpha_psi = 0.5;
  cfg.v1_bar = 2.0;
  cfg.a_max = Vec3(1.0, 1.0, 10.0);
  const auto mats = build_matrices(g, phys, cfg);
  const auto consts = stability_constants(mats, g, phys, cfg);
  const auto bounds = uniform_bounds(mats, consts, g, cfg, phys);
  if (!std::isfinite(bounds.Lu)) {
    CHECK_FALSE(thrust_compatible(bounds, phys, cfg, 1e12));
  } else {
    CHECK(bounds.Lu > 0.0);
  }
}

TEST_CASE("degenerate gains are rejected") {
  const auto phys = testutil::reference_phys();
  const auto cfg = testutil::reference_cfg();
  CHECK_THROWS_AS(build_matrices(Gains{}, phys, cfg), Error);

  PhysicalParams bad = phys;
  bad.J = Vec3(1.0, 1.0, -1.0).asDiagonal();
  CHECK_THROWS_AS(build_matrices(testutil::reference_gains(), bad, cfg),
                  NotSpdError);
}

TEST_CASE("envelope specializes exactly when one argument vanishes") {
  const auto consts =
      stability_constants(build_matrices(testutil::reference_gains(),
                                         testutil::reference_phys(),
                                         testutil::reference_cfg()),
                          testutil::reference_gains(),
                          testutil::reference_phys(),
                          testutil::reference_cfg());
  SplitMix64 rng(29);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(0.0, 4.0);
    const double t = rng.uniform(0.0, 10.0);
    const double want = std::sqrt(x) * std::exp(-consts.alpha0 * t / 2.0);
    CHECK(rel(L_of_t(x, 0.0, t, consts), want) < 1e-14);
  }
  const double y = 0.3;
  const double at_zero = L_of_t(0.2, y, 0.0, consts);
  const double want =
      std::sqrt(0.5) * std::exp(consts.alpha1 * std::sqrt(y) /
                                (2.0 * consts.beta));
  CHECK(rel(at_zero, want) < 1e-14);
}

TEST_CASE("envelope rejects negative arguments") {
  const auto consts =
      stability_constants(build_matrices(testutil::reference_gains(),
                                         testutil::reference_phys(),
                                         testutil::reference_cfg()),
                          testutil::reference_gains(),
                          testutil::reference_phys(),
                          testutil::reference_cfg());
  CHECK_THROWS_AS(L_of_t(-0.1, 0.2, 1.0, consts), DomainError);
  CHECK_THROWS_AS(L_of_t(0.1, -0.2, 1.0, consts), DomainError);
  CHECK_THROWS_AS(L_of_t(0.1, 0.2, -1.0, consts), DomainError);
}

TEST_CASE("envelope agrees with quadrature of its integral") {
  SplitMix64 rng(31);
  for (int i = 0; i < 200; ++i) {
    StabilityConstants c;
    c.beta = rng.uniform(0.1, 6.0);
    c.alpha0 = (i % 7 == 0) ? 2.0 * c.beta
                            : rng.uniform(0.05, 2.0 * c.beta);
    c.alpha1 = rng.uniform(0.0, 3.0);
    c.alpha2 = rng.uniform(0.0, 10.0);
    const double x = rng.uniform(0.0, 2.0);
    const double y = rng.uniform(0.0, 2.0);
    const double t = rng.uniform(0.0, 8.0);
    const double got = L_of_t(x, y, t, c);
    const double want = testutil::L_quadrature(x, y, t, c);
    CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("matched decay rates use the limiting integral") {
  StabilityConstants c;
  c.beta = 1.25;
  c.alpha0 = 2.5;
  c.alpha1 = 0.8;
  c.alpha2 = 2.0;
  const double got = L_of_t(0.5, 0.4, 3.0, c);
  const double want = testutil::L_quadrature(0.5, 0.4, 3.0, c);
  CHECK(rel(got, want) < 1e-12);
}

TEST_CASE("peak time maximizes the envelope") {
  const auto cfg = testutil::reference_cfg();
  const auto mats = build_matrices(testutil::reference_gains(),
                                   testutil::reference_phys(), cfg);
  const auto consts = stability_constants(mats, testutil::reference_gains(),
                                          testutil::reference_phys(), cfg);
  const auto bounds = uniform_bounds(mats, consts, testutil::reference_gains(),
                                     cfg, testutil::reference_phys());
  const double tm = t_max(cfg.v1_bar, bounds.v2_bar, consts);
  CHECK(rel(tm, kTm) < 1e-12);

  SplitMix64 rng(37);
  for (int i = 0; i < 100; ++i) {
    StabilityConstants c;
    c.beta = rng.uniform(0.1, 6.0);
    c.alpha0 = (i % 9 == 0) ? 2.0 * c.beta : rng.uniform(0.05, 2.0 * c.beta);
    c.alpha1 = rng.uniform(0.0, 3.0);
    c.alpha2 = rng.uniform(0.0, 10.0);
    const double x = rng.uniform(0.0, 2.0);
    const double y = (i % 5 == 0) ? 0.0 : rng.uniform(0.0, 2.0);
    const double tm_i = t_max(x, y, c);
    CHECK(tm_i >= 0.0);
    const double peak = L_of_t(x, y, tm_i, c);
    const double grid =
        testutil::grid_peak(x, y, c, 3.0 * tm_i + 5.0, 20000);
    CHECK(peak >= grid - 1e-9 * std::max(1.0, grid));
  }
}

TEST_CASE("uniform bounds on the benchmark match the frozen references") {
  const auto bounds = testutil::reference_bounds();
  CHECK(rel(bounds.v2_bar, kV2Bar) < 1e-12);
  CHECK(rel(bounds.Lu, kLu) < 1e-12);
  CHECK(rel(bounds.Lp, kLp) < 1e-12);
  CHECK(rel(bounds.Lv, kLv) < 1e-12);
  CHECK(rel(bounds.Lf, kLf) < 1e-12);
  CHECK(rel(bounds.Fbar, kFbar) < 1e-12);
  CHECK(rel(testutil::reference_phys().m *
                testutil::reference_cfg().a_max.norm(),
            kMAmax) < 1e-14);
}

TEST_CASE("benchmark bounds reproduce the published four digit values") {
  const auto bounds = testutil::reference_bounds();
  CHECK(std::abs(bounds.Lp - 0.3374) < 5e-5);
  CHECK(std::abs(bounds.Lv - 0.6968) < 5e-5);
  CHECK(std::abs(bounds.Lf - 6.2445) < 5e-5);
  CHECK(std::abs(bounds.Lu - 0.9737) < 5e-5);
  CHECK(std::abs(bounds.Fbar - 50.0763) < 5e-5);
}

TEST_CASE("zero ceilings collapse every deviation bound") {
  auto cfg = testutil::reference_cfg();
  cfg.psi_bar = 0.0;
  cfg.v1_bar = 0.0;
  const auto g = testutil::reference_gains();
  const auto phys = testutil::reference_phys();
  const auto mats = build_matrices(g, phys, cfg);
  const auto consts = stability_constants(mats, g, phys, cfg);
  const auto bounds = uniform_bounds(mats, consts, g, cfg, phys);
  CHECK(bounds.v2_bar == 0.0);
  CHECK(bounds.Lu == 0.0);
  CHECK(bounds.Lp == 0.0);
  CHECK(bounds.Lv == 0.0);
  CHECK(bounds.Lf == 0.0);
  CHECK(bounds.Fbar ==
        doctest::Approx(phys.m * cfg.a_max.norm()).epsilon(1e-15));
}

TEST_CASE("the uniform bound dominates the envelope at every time") {
  const auto cfg = testutil::reference_cfg();
  const auto bounds = testutil::reference_bounds();
  const auto consts = bounds.consts;
  SplitMix64 rng(41);
  for (int i = 0; i < 10000; ++i) {
    const double t = rng.uniform(0.0, 50.0);
    CHECK(L_of_t(cfg.v1_bar, bounds.v2_bar, t, consts) <=
          bounds.Lu * (1.0 + 1e-12) + 1e-15);
  }
}

TEST_CASE("the uniform bound is monotone in both initial energies") {
  const auto bounds = testutil::reference_bounds();
  const auto consts = bounds.consts;
  auto lu = [&](double x, double y) {
    return L_of_t(x, y, t_max(x, y, consts), consts);
  };
  const int n = 30;
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j + 1 < n; ++j) {
      const double x = 0.5 * i / (n - 1.0);
      const double y = 0.3 * j / (n - 1.0);
      const double dx = 0.5 / (n - 1.0);
      const double dy = 0.3 / (n - 1.0);
      CHECK(lu(x + dx, y) >= lu(x, y) - 1e-12);
      CHECK(lu(x, y + dy) >= lu(x, y) - 1e-12);
    }
  }
}

TEST_CASE("quadratic energies match their defining forms") {
  const auto g = testutil::reference_gains();
  const auto phys = testutil::reference_phys();
  const auto cfg = testutil::reference_cfg();
  const auto mats = build_matrices(g, phys, cfg);
  SplitMix64 rng(43);
  for (int i = 0; i < 500; ++i) {
    const Vec3 e_p = testutil::random_vec(rng);
    const Vec3 e_v = testutil::random_vec(rng);
    const Vec3 e_R = testutil::random_vec(rng, 0.5);
    const Vec3 e_w = testutil::random_vec(rng);
    const double psi = rng.uniform(0.0, 1.0);

    Vec6 z1;
    z1 << e_p, e_v;
    const double v1 = eval_V1(e_p, e_v, mats);
    CHECK(rel(v1, z1.dot(mats.M1 * z1)) < 1e-13);
    CHECK(v1 > 0.0);

    const double v2 = eval_V2(e_R, e_w, psi, mats, g, phys);
    const double direct = 0.5 * e_w.dot(phys.J * e_w) + g.kR * psi +
                          mats.c2 * e_R.dot(e_w);
    CHECK(std::abs(v2 - direct) <= 1e-13 * std::max(1.0, std::abs(direct)));

    CHECK(rel(eval_V(e_p, e_v, e_R, e_w, psi, mats, g, phys), v1 + v2) <
          1e-13);
  }
}

TEST_CASE("attitude energy is sandwiched by its quadratic comparisons") {
  const auto g = testutil::reference_gains();
  const auto phys = testutil::reference_phys();
  const auto cfg = testutil::reference_cfg();
  const auto mats = build_matrices(g, phys, cfg);

  // Rotations kept below the configured ceiling psi_bar; the sandwich is
  // only claimed there.
  const double max_angle = std::acos(1.0 - cfg.psi_bar) * 0.999;
  SplitMix64 rng(47);
  long accepted = 0;
  while (accepted < 10000) {
    const Mat3 r_d = testutil::random_rotation(rng);
    const Mat3 r = r_d * exp_so3(rng.uniform(0.0, max_angle) *
                                 testutil::random_unit(rng));
    QuadState s;
    s.R = r;
    s.w = testutil::random_vec(rng, 2.0);
    DesiredState d;
    d.R = r_d;
    d.w = testutil::random_vec(rng, 2.0);
    const TrackingErrors e = tracking_errors(s, d);
    if (e.psi > cfg.psi_bar) {
      continue;
    }
    ++accepted;
    const double v2 = eval_V2(e.e_R, e.e_w, e.psi, mats, g, phys);
    Vec6 z2;
    z2 << e.e_R, e.e_w;
    const double lower = z2.dot(mats.M21 * z2);
    const double upper = z2.dot(mats.M22 * z2);
    const double scale = std::max(1.0, upper);
    CHECK((lower - v2) / scale <= 1e-12);
    CHECK((v2 - upper) / scale <= 1e-12);
  }
}

TEST_CASE("initial set membership uses closed inequalities") {
  const auto g = testutil::reference_gains();
  const auto phys = testutil::reference_phys();
  const auto cfg = testutil::reference_cfg();

  const auto nominal = initial_set_check(0.0, Vec3::Zero(), 0.0, g, phys, cfg);
  CHECK(nominal.member);
  CHECK(nominal.psi_limit ==
        doctest::Approx(cfg.alpha_psi * cfg.psi_bar).epsilon(1e-15));
  CHECK(nominal.rot_energy_limit ==
        doctest::Approx(g.kR * (1.0 - cfg.alpha_psi) * cfg.psi_bar)
            .epsilon(1e-15));
  CHECK(nominal.v1_limit == cfg.v1_bar);

  const double psi_edge = cfg.alpha_psi * cfg.psi_bar;
  CHECK(initial_set_check(psi_edge, Vec3::Zero(), 0.0, g, phys, cfg).member);
  CHECK_FALSE(initial_set_check(psi_edge * (1.0 + 1e-9), Vec3::Zero(), 0.0, g,
                                phys, cfg)
                  .member);

  const double energy_limit = g.kR * (1.0 - cfg.alpha_psi) * cfg.psi_bar;
  const double w1 = std::sqrt(2.0 * energy_limit / phys.J(0, 0));
  const auto at_edge = initial_set_check(
      0.0, Vec3(w1 * (1.0 - 1e-12), 0.0, 0.0), 0.0, g, phys, cfg);
  CHECK(at_edge.member);
  CHECK(at_edge.rot_energy0 ==
        doctest::Approx(energy_limit).epsilon(1e-9));
  CHECK_FALSE(initial_set_check(0.0, Vec3(w1 * (1.0 + 1e-6), 0.0, 0.0), 0.0,
                                g, phys, cfg)
                  .member);

  CHECK(initial_set_check(0.0, Vec3::Zero(), cfg.v1_bar, g, phys, cfg).member);
  CHECK_FALSE(initial_set_check(0.0, Vec3::Zero(), cfg.v1_bar * (1.0 + 1e-12),
                                g, phys, cfg)
                  .member);
}

TEST_CASE("envelope dominates the extremal comparison dynamics") {
  const auto r = testutil::envelope_ode_suite(200, 53);
  CHECK(r.cases == 200);
  CHECK(r.failures == 0);
}

TEST_CASE("thrust compatibility compares the ceiling to the actuator") {
  const auto bounds = testutil::reference_bounds();
  const auto phys = testutil::reference_phys();
  const auto cfg = testutil::reference_cfg();
  CHECK(thrust_compatible(bounds, phys, cfg, 85.1508));
  CHECK_FALSE(thrust_compatible(bounds, phys, cfg, 50.0));
  CHECK(thrust_compatible(bounds, phys, cfg, bounds.Fbar));
}
