#pragma once

// Phase constitutive models: isotropic/orthotropic linear elasticity and
// small-strain von Mises plasticity (radial return, isotropic hardening).
// All stress-like quantities in GPa, strains dimensionless, Mandel vectors.

#include <utility>
#include <variant>
#include <vector>

#include "dmn/mandel.hpp"

namespace dmn {

// Breakpoints (eps_p, sigma_y); linear between, last slope extrapolated.
struct PiecewiseLinearHardening {
  std::vector<std::pair<double, double>> points;
};

// sigma_y(e) = (sigma_y0 - sigma_u) exp(-a e) + E_h e + sigma_u
struct ExponentialHardening {
  double sigma_y0 = 0.0;
  double sigma_u = 0.0;
  double E_h = 0.0;
  double a = 0.0;
};

using HardeningLaw = std::variant<PiecewiseLinearHardening, ExponentialHardening>;

double yield_stress(const HardeningLaw& law, double eps_p);
double hardening_modulus(const HardeningLaw& law, double eps_p);

Mat6 isotropic_stiffness(double E, double nu);
// Engineering constants with the axis-3 symmetry direction last; nu_ij is
// the contraction in j under uniaxial stress along i.
Mat6 orthotropic_stiffness(double E1, double E2, double E3, double G23,
                           double G13, double G12, double nu21, double nu31,
                           double nu32);

struct Material {
  Mat6 C = Mat6::Zero();  // elastic stiffness, material frame
  double E_ref = 0.0;     // reference Young's modulus (cohesive penalty)
  bool plastic = false;
  double shear = 0.0;     // G and K of the isotropic elastic part,
  double bulk = 0.0;      // used by the return map only
  HardeningLaw law;
};

Material make_elastic_isotropic(double E, double nu);
Material make_elastic_orthotropic(double E1, double E2, double E3, double G23,
                                  double G13, double G12, double nu21,
                                  double nu31, double nu32);
Material make_plastic(double E, double nu, HardeningLaw law);

struct PlasticState {
  Vec6 eps_p = Vec6::Zero();  // plastic strain, Mandel
  double eps_p_eq = 0.0;      // effective plastic strain
};

struct BaseEvaluation {
  Vec6 sigma = Vec6::Zero();      // total stress at the new state
  Mat6 C_alg = Mat6::Zero();      // consistent tangent d sigma / d eps
  Mat6 D = Mat6::Zero();          // algorithmic compliance, C_alg^-1
  Vec6 deps_res = Vec6::Zero();   // residual: deps = D dsig + deps_res
  PlasticState state;
};

// Total-strain driven evaluation over one increment. eps_old/deps are total
// strains in the material frame; the prior state must be the converged
// state at eps_old.
BaseEvaluation evaluate_base(const Material& mat, const PlasticState& prior,
                             const Vec6& eps_old, const Vec6& deps);

}  // namespace dmn
