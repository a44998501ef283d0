#pragma once

// Cohesive layer: mixed-mode effective traction-separation law (bilinear
// backbone, tension/compression branches, kappa floor), viscous damage
// regularization, algorithmic tangent, and the crack enrichment of a
// bottom-layer cell response.

#include <vector>

#include "dmn/mandel.hpp"

namespace dmn {

struct CohesiveParams {
  double t_c = 0.0;    // critical effective traction, GPa
  double G_c = 0.0;    // critical energy release rate, GPa*mm
  double beta = 1.0;   // normal/shear mixing ratio
  double tau = 1.0;    // relaxation time, ms
  double K = 1e8;      // initial stiffness, GPa/mm
  double kappa = 1e-4; // floor stiffness on the whole curve, GPa/mm
  double K_h = 0.0;    // hardening stiffness E_base * v_c, GPa/mm

  double d_c() const { return t_c / K; }
  double d_f() const { return 2.0 * G_c / t_c; }
};

// Layer vectors live in the crack frame: components (s, t, n) with the
// normal last.
struct CohesiveState {
  Vec3 d = Vec3::Zero();        // opening at the committed state, mm
  Vec3 traction = Vec3::Zero(); // traction at the committed state, GPa
  double d_0 = 0.0;             // history: opening of the max feasible state
  double t_0 = 0.0;             // history: its backbone traction
  double D_v = 1.0;             // viscous damage
};

CohesiveState make_cohesive_state(const CohesiveParams& p);

// Mixed-mode scalar measures; the branch follows the sign of the normal
// component d_n = d . n_c (resp. t_n).
double effective_opening(const Vec3& d, const Vec3& n_c, double beta);
double effective_traction(const Vec3& t, const Vec3& n_c, double beta);

// Inviscid backbone envelope t_m(d_m) (without the kappa floor).
double backbone_traction(const CohesiveParams& p, double d_m);

struct TractionResult {
  Vec3 traction = Vec3::Zero();   // crack frame, GPa
  Mat3 G = Mat3::Zero();          // layer compliance, mm/GPa
  Vec3 dd_res = Vec3::Zero();     // residual: dd = G dt + dd_res
  CohesiveState state;
};

// One increment of the regularized law; dd is the opening increment in the
// crack frame, dt the time increment (ms). Total (never throws).
TractionResult evaluate_cohesive(const CohesiveParams& p,
                                 const CohesiveState& prior, const Vec3& dd,
                                 double dt);

// Free energy per unit area stored/dissipated by the layer at its history
// state; equals G_c at full failure.
double cohesive_energy(const CohesiveParams& p, const CohesiveState& s);

// Deterministic orthonormal crack frame: columns (s, t, n_c).
Mat3 crack_frame(const Vec3& n_c);

// 6x3 map from a crack-frame layer vector to the Mandel strain contribution
// of the smeared opening; its transpose extracts the crack-frame traction
// from a Mandel stress.
Eigen::Matrix<double, 6, 3> crack_rotation(const Vec3& n_c);

struct CrackContribution {
  double v_c = 0.0;                 // reciprocal length, 1/mm
  Eigen::Matrix<double, 6, 3> R;    // crack_rotation(n_c)
  Mat3 G = Mat3::Zero();
  Vec3 dd_res = Vec3::Zero();
};

struct EnrichedResponse {
  Mat6 C = Mat6::Zero();
  Vec6 dsig = Vec6::Zero();
};

// C_N = [D_base + sum v_c R G R^T]^-1, dsig_N = -C_N [deps_res + sum v_c R dd_res]
EnrichedResponse enrich_cell_response(const Mat6& D_base,
                                      const Vec6& deps_res,
                                      const std::vector<CrackContribution>& cracks);

}  // namespace dmn
