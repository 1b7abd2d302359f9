#pragma once

#include "reachcert/so3.hpp"
#include "reachcert/spd.hpp"

namespace reachcert {

struct PhysicalParams {
  double m = 0.0;          // mass, kg
  Mat3 J = Mat3::Zero();   // inertia, kg m^2, SPD
  double g = 9.81;         // gravitational acceleration, m/s^2
};

struct Gains {
  double kp = 0.0;
  double kv = 0.0;
  double kR = 0.0;
  double kw = 0.0;
  double gamma1 = 0.0;  // in (0,1); places c1 inside its admissible interval
  double gamma2 = 0.0;  // in (0,1); same for c2
};

struct BoundConfig {
  double psi_bar = 0.0;         // attitude-error ceiling, in (0,2)
  double alpha_psi = 0.0;       // split of psi_bar between Psi(0) and e_w(0), in (0,1)
  double v1_bar = 0.0;          // translational Lyapunov ceiling at t=0
  Vec3 a_max = Vec3::Zero();    // acceleration envelope, m/s^2, positive
  double eps = 1e-6;            // vertical-thrust floor margin, N
};

struct LyapunovMatrices {
  double c1 = 0.0;
  double c2 = 0.0;
  Mat6 M1 = Mat6::Zero();
  Mat6 W1 = Mat6::Zero();
  Mat6 M21 = Mat6::Zero();
  Mat6 M22 = Mat6::Zero();
  Mat6 W2 = Mat6::Zero();
};

struct StabilityConstants {
  double beta = 0.0;
  double alpha0 = 0.0;  // <= 2 beta by construction
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

// The full certified-bound bundle for one gain choice.
struct BoundSet {
  LyapunovMatrices mats;
  StabilityConstants consts;
  double v2_bar = 0.0;  // attitude Lyapunov ceiling implied by psi_bar
  double Lu = 0.0;      // uniform bound on sqrt(V)
  double Lp = 0.0;      // position deviation, m
  double Lv = 0.0;      // velocity deviation, m/s
  double Lf = 0.0;      // PD-force deviation, N
  double Fbar = 0.0;    // thrust ceiling Lf + m*|a_max|, N
};

// Mixing constants c1, c2 and the five Lyapunov matrices. Throws Error if
// any matrix fails the positive-definiteness check, which the admissible
// ranges of c1, c2 rule out for valid inputs.
LyapunovMatrices build_matrices(const Gains& g, const PhysicalParams& p,
                                const BoundConfig& cfg);

// Decay/coupling constants beta, alpha0, alpha1, alpha2.
StabilityConstants stability_constants(const LyapunovMatrices& L, const Gains& g,
                                       const PhysicalParams& p,
                                       const BoundConfig& cfg);

// The envelope sqrt(V(t)) <= L(V1(0), V2(0), t). x and y are the initial
// Lyapunov values; negative arguments are domain errors.
double L_of_t(double x, double y, double t, const StabilityConstants& c);

// Argmax of t -> L_of_t(x, y, t); always >= 0, and 0 when y = 0.
double t_max(double x, double y, const StabilityConstants& c);

// The uniform bounds Lu/Lp/Lv/Lf and Fbar for initial values up to
// (v1_bar, v2_bar).
BoundSet uniform_bounds(const LyapunovMatrices& L, const StabilityConstants& c,
                        const Gains& g, const BoundConfig& cfg,
                        const PhysicalParams& p);

double eval_V1(const Vec3& e_p, const Vec3& e_v, const LyapunovMatrices& L);
double eval_V2(const Vec3& e_R, const Vec3& e_w, double psi,
               const LyapunovMatrices& L, const Gains& g,
               const PhysicalParams& p);
double eval_V(const Vec3& e_p, const Vec3& e_v, const Vec3& e_R,
              const Vec3& e_w, double psi, const LyapunovMatrices& L,
              const Gains& g, const PhysicalParams& p);

// m*|a_max| + Lf <= f_max: the gain choice leaves enough thrust authority
// for the acceleration envelope plus the worst-case PD force.
bool thrust_compatible(const BoundSet& B, const PhysicalParams& p,
                       const BoundConfig& cfg, double f_max);

// Membership report for the certified initial set: the three left-hand
// sides, their ceilings, and the conjunction (closed inequalities).
struct InitialSetReport {
  double psi0 = 0.0;
  double rot_energy0 = 0.0;  // e_w(0)' J e_w(0) / 2
  double v1_0 = 0.0;
  double psi_limit = 0.0;         // alpha_psi * psi_bar
  double rot_energy_limit = 0.0;  // kR * (1 - alpha_psi) * psi_bar
  double v1_limit = 0.0;          // v1_bar
  bool member = false;
};

// Error-space form; the state-space overload lives with the controller.
InitialSetReport initial_set_check(double psi0, const Vec3& e_w0, double v1_0,
                                   const Gains& g, const PhysicalParams& p,
                                   const BoundConfig& cfg);

}  // namespace reachcert
