#include "reachcert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace reachcert {

namespace {

// Rates closer than this are treated as the equal-rate limit in the
// envelope integral and its maximizer.
constexpr double kRateTol = 1e-12;

void require_pd(const Mat6& m, const char* name) {
  const double min_eig = sym_eig_bounds(m).first;
  if (!(min_eig > detail::kSpdMinEig)) {
    throw Error(std::string("build_matrices: ") + name +
                " is not positive definite (min eigenvalue " +
                std::to_string(min_eig) + ")");
  }
}

Mat6 block6(const Mat3& a, const Mat3& b, const Mat3& c, const Mat3& d) {
  Mat6 m;
  m << a, b, c, d;
  return m;
}

}  // namespace

LyapunovMatrices build_matrices(const Gains& g, const PhysicalParams& p,
                                const BoundConfig& cfg) {
  const double lam_j = sym_eig_bounds(p.J).first;
  if (!(lam_j > detail::kSpdMinEig)) {
    throw NotSpdError("build_matrices: inertia matrix is not positive definite",
                      lam_j);
  }

  LyapunovMatrices L;
  L.c1 = g.gamma1 * std::min(std::sqrt(g.kp * p.m),
                             4.0 * p.m * g.kp * g.kv /
                                 (g.kv * g.kv + 4.0 * p.m * g.kp));
  L.c2 = g.gamma2 * std::min(std::sqrt(g.kR * lam_j),
                             4.0 * lam_j * g.kR * g.kw /
                                 (g.kw * g.kw + 4.0 * lam_j * g.kR));

  const Mat3 I = Mat3::Identity();
  L.M1 = 0.5 * block6(g.kp * I, L.c1 * I, L.c1 * I, p.m * I);
  L.W1 = block6(L.c1 * g.kp / p.m * I, L.c1 * g.kv / (2.0 * p.m) * I,
                L.c1 * g.kv / (2.0 * p.m) * I, (g.kv - L.c1) * I);
  L.M21 = 0.5 * block6(g.kR * I, L.c2 * I, L.c2 * I, p.J);
  L.M22 = 0.5 * block6(2.0 * g.kR / (2.0 - cfg.psi_bar) * I, L.c2 * I,
                       L.c2 * I, p.J);
  const Mat3 j_inv = p.J.inverse();
  L.W2 = block6(L.c2 * g.kR * j_inv, L.c2 * g.kw / 2.0 * j_inv,
                L.c2 * g.kw / 2.0 * j_inv, (g.kw - L.c2) * I);

  require_pd(L.M1, "M1");
  require_pd(L.W1, "W1");
  require_pd(L.M21, "M21");
  require_pd(L.M22, "M22");
  require_pd(L.W2, "W2");
  return L;
}

StabilityConstants stability_constants(const LyapunovMatrices& L, const Gains& g,
                                       const PhysicalParams& p,
                                       const BoundConfig& cfg) {
  const Mat6 m1_is = spd_inv_sqrt(L.M1);
  const Mat6 m21_is = spd_inv_sqrt(L.M21);
  const Mat6 m22_is = spd_inv_sqrt(L.M22);

  StabilityConstants c;
  c.beta = sym_eig_bounds((m22_is * L.W2 * m22_is).eval()).first / 2.0;
  c.alpha0 = std::min(sym_eig_bounds((m1_is * L.W1 * m1_is).eval()).first,
                      2.0 * c.beta);

  const Mat3 I = Mat3::Identity();
  Mat36 sel_cv;  // [c1/m I, I]
  sel_cv << L.c1 / p.m * I, I;
  Mat36 sel_pd;  // [kp I, kv I]
  sel_pd << g.kp * I, g.kv * I;
  Mat36 sel_r;  // [I, 0]
  sel_r << I, Mat3::Zero();

  const double psi_factor = std::sqrt(2.0 / (2.0 - cfg.psi_bar));
  const double n_cv = induced_norm2((sel_cv * m1_is).eval());
  const double n_r = induced_norm2((sel_r * m21_is).eval());
  c.alpha1 = n_cv * induced_norm2((sel_pd * m1_is).eval()) * n_r * psi_factor;
  c.alpha2 = p.m * cfg.a_max.norm() * n_cv * n_r * psi_factor;
  return c;
}

double L_of_t(double x, double y, double t, const StabilityConstants& c) {
  if (x < 0.0 || y < 0.0 || t < 0.0) {
    throw DomainError("L_of_t: arguments must be nonnegative");
  }
  const double pref = std::exp(c.alpha1 * std::sqrt(y) / (2.0 * c.beta));
  const double decay = std::exp(-c.alpha0 / 2.0 * t);
  const double rate = c.alpha0 / 2.0 - c.beta;
  const double integral =
      std::abs(rate) < kRateTol ? t : (std::exp(rate * t) - 1.0) / rate;
  return pref * decay * (std::sqrt(x + y) + c.alpha2 * std::sqrt(y) / 2.0 * integral);
}

double t_max(double x, double y, const StabilityConstants& c) {
  if (y <= 0.0) {
    return 0.0;
  }
  const double sy = std::sqrt(y);
  const double sxy = std::sqrt(x + y);
  if (std::abs(c.alpha0 / 2.0 - c.beta) < kRateTol) {
    return std::max(2.0 * (c.alpha2 * sy - c.alpha0 * sxy) /
                        (c.alpha0 * c.alpha2 * sy),
                    0.0);
  }
  const double gap = 2.0 * c.beta - c.alpha0;  // > 0 off the equal-rate branch
  const double num = c.alpha2 * c.beta * sy / gap;
  const double den =
      c.alpha0 / 2.0 * sxy + c.alpha0 * c.alpha2 * sy / (2.0 * gap);
  const double ratio = num / den;
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    return 0.0;
  }
  return std::max(std::log(ratio) / (c.beta - c.alpha0 / 2.0), 0.0);
}

BoundSet uniform_bounds(const LyapunovMatrices& L, const StabilityConstants& c,
                        const Gains& g, const BoundConfig& cfg,
                        const PhysicalParams& p) {
  BoundSet B;
  B.mats = L;
  B.consts = c;

  const double lam_j = sym_eig_bounds(p.J).first;
  B.v2_bar = (g.kR + 2.0 * L.c2 *
                         std::sqrt(g.kR / lam_j * cfg.alpha_psi *
                                   (1.0 - cfg.alpha_psi))) *
             cfg.psi_bar;
  B.Lu = L_of_t(cfg.v1_bar, B.v2_bar, t_max(cfg.v1_bar, B.v2_bar, c), c);

  const Mat6 m1_is = spd_inv_sqrt(L.M1);
  const Mat3 I = Mat3::Identity();
  Mat36 sel_p, sel_v, sel_f;
  sel_p << I, Mat3::Zero();
  sel_v << Mat3::Zero(), I;
  sel_f << g.kp * I, g.kv * I;
  B.Lp = induced_norm2((sel_p * m1_is).eval()) * B.Lu;
  B.Lv = induced_norm2((sel_v * m1_is).eval()) * B.Lu;
  B.Lf = induced_norm2((sel_f * m1_is).eval()) * B.Lu;
  B.Fbar = B.Lf + p.m * cfg.a_max.norm();
  return B;
}

double eval_V1(const Vec3& e_p, const Vec3& e_v, const LyapunovMatrices& L) {
  Vec6 z;
  z << e_p, e_v;
  return z.dot(L.M1 * z);
}

double eval_V2(const Vec3& e_R, const Vec3& e_w, double psi,
               const LyapunovMatrices& L, const Gains& g,
               const PhysicalParams& p) {
  return 0.5 * e_w.dot(p.J * e_w) + g.kR * psi + L.c2 * e_R.dot(e_w);
}

double eval_V(const Vec3& e_p, const Vec3& e_v, const Vec3& e_R,
              const Vec3& e_w, double psi, const LyapunovMatrices& L,
              const Gains& g, const PhysicalParams& p) {
  return eval_V1(e_p, e_v, L) + eval_V2(e_R, e_w, psi, L, g, p);
}

bool thrust_compatible(const BoundSet& B, const PhysicalParams& p,
                       const BoundConfig& cfg, double f_max) {
  return p.m * cfg.a_max.norm() + B.Lf <= f_max;
}

InitialSetReport initial_set_check(double psi0, const Vec3& e_w0, double v1_0,
                                   const Gains& g, const PhysicalParams& p,
                                   const BoundConfig& cfg) {
  InitialSetReport r;
  r.psi0 = psi0;
  r.rot_energy0 = 0.5 * e_w0.dot(p.J * e_w0);
  r.v1_0 = v1_0;
  r.psi_limit = cfg.alpha_psi * cfg.psi_bar;
  r.rot_energy_limit = g.kR * (1.0 - cfg.alpha_psi) * cfg.psi_bar;
  r.v1_limit = cfg.v1_bar;
  r.member = r.psi0 <= r.psi_limit && r.rot_energy0 <= r.rot_energy_limit &&
             r.v1_0 <= r.v1_limit;
  return r;
}

}  // namespace reachcert
