#include "dmn/materials.hpp"

#include <cmath>
#include <stdexcept>

namespace dmn {

namespace {

void check_eps_p(double eps_p) {
  if (eps_p < 0.0 || !std::isfinite(eps_p)) {
    throw std::invalid_argument("effective plastic strain must be >= 0");
  }
}

}  // namespace

double yield_stress(const HardeningLaw& law, double eps_p) {
  check_eps_p(eps_p);
  if (const auto* pl = std::get_if<PiecewiseLinearHardening>(&law)) {
    const auto& p = pl->points;
    if (p.size() < 2) throw std::invalid_argument("need >= 2 breakpoints");
    std::size_t i = 1;
    while (i + 1 < p.size() && eps_p > p[i].first) ++i;
    double slope =
        (p[i].second - p[i - 1].second) / (p[i].first - p[i - 1].first);
    return p[i - 1].second + slope * (eps_p - p[i - 1].first);
  }
  const auto& e = std::get<ExponentialHardening>(law);
  return (e.sigma_y0 - e.sigma_u) * std::exp(-e.a * eps_p) + e.E_h * eps_p +
         e.sigma_u;
}

double hardening_modulus(const HardeningLaw& law, double eps_p) {
  check_eps_p(eps_p);
  if (const auto* pl = std::get_if<PiecewiseLinearHardening>(&law)) {
    const auto& p = pl->points;
    if (p.size() < 2) throw std::invalid_argument("need >= 2 breakpoints");
    std::size_t i = 1;
    // Right derivative at breakpoints so the return-map Newton keeps moving.
    while (i + 1 < p.size() && eps_p >= p[i].first) ++i;
    return (p[i].second - p[i - 1].second) / (p[i].first - p[i - 1].first);
  }
  const auto& e = std::get<ExponentialHardening>(law);
  return -e.a * (e.sigma_y0 - e.sigma_u) * std::exp(-e.a * eps_p) + e.E_h;
}

Mat6 isotropic_stiffness(double E, double nu) {
  double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  double mu = E / (2.0 * (1.0 + nu));
  Mat6 C = Mat6::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) C(i, j) = lambda;
    C(i, i) += 2.0 * mu;
    C(i + 3, i + 3) = 2.0 * mu;
  }
  return C;
}

Mat6 orthotropic_stiffness(double E1, double E2, double E3, double G23,
                           double G13, double G12, double nu21, double nu31,
                           double nu32) {
  Mat6 S = Mat6::Zero();
  S(0, 0) = 1.0 / E1;
  S(1, 1) = 1.0 / E2;
  S(2, 2) = 1.0 / E3;
  S(0, 1) = S(1, 0) = -nu21 / E2;
  S(0, 2) = S(2, 0) = -nu31 / E3;
  S(1, 2) = S(2, 1) = -nu32 / E3;
  S(3, 3) = 1.0 / (2.0 * G23);
  S(4, 4) = 1.0 / (2.0 * G13);
  S(5, 5) = 1.0 / (2.0 * G12);
  Mat6 C = S.inverse();
  Eigen::SelfAdjointEigenSolver<Mat6> es(C);
  if (es.eigenvalues()(0) <= 0.0) {
    throw std::invalid_argument("orthotropic constants are not admissible");
  }
  return C;
}

Material make_elastic_isotropic(double E, double nu) {
  Material m;
  m.C = isotropic_stiffness(E, nu);
  m.E_ref = E;
  return m;
}

Material make_elastic_orthotropic(double E1, double E2, double E3, double G23,
                                  double G13, double G12, double nu21,
                                  double nu31, double nu32) {
  Material m;
  m.C = orthotropic_stiffness(E1, E2, E3, G23, G13, G12, nu21, nu31, nu32);
  m.E_ref = E1;
  return m;
}

Material make_plastic(double E, double nu, HardeningLaw law) {
  Material m = make_elastic_isotropic(E, nu);
  m.plastic = true;
  m.shear = E / (2.0 * (1.0 + nu));
  m.bulk = E / (3.0 * (1.0 - 2.0 * nu));
  m.law = std::move(law);
  return m;
}

namespace {

// Consistency equation g(dg) = q_trial - 3G dg - sigma_y(e0 + dg) = 0.
double solve_return(const Material& mat, double q_trial, double e0) {
  double G3 = 3.0 * mat.shear;
  double lo = 0.0;
  double g_lo = q_trial - yield_stress(mat.law, e0);
  // Bracket: g is decreasing whenever 3G + h > 0, which holds here.
  double hi = g_lo / G3;
  double g_hi = q_trial - G3 * hi - yield_stress(mat.law, e0 + hi);
  int guard = 0;
  while (g_hi > 0.0 && ++guard < 200) {
    hi *= 2.0;
    g_hi = q_trial - G3 * hi - yield_stress(mat.law, e0 + hi);
  }
  if (g_hi > 0.0) throw std::runtime_error("return map failed to bracket");
  double x = hi;
  for (int it = 0; it < 100; ++it) {
    double g = q_trial - G3 * x - yield_stress(mat.law, e0 + x);
    if (std::abs(g) < 1e-14 * std::max(1.0, q_trial)) return x;
    if (g > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double h = hardening_modulus(mat.law, e0 + x);
    double step = g / (G3 + h);
    double xn = x + step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);  // bisection fallback
    x = xn;
  }
  throw std::runtime_error("return map did not converge");
}

}  // namespace

BaseEvaluation evaluate_base(const Material& mat, const PlasticState& prior,
                             const Vec6& eps_old, const Vec6& deps) {
  BaseEvaluation out;
  out.state = prior;
  Vec6 eps_new = eps_old + deps;
  Vec6 sig_old = mat.C * (eps_old - prior.eps_p);
  if (!mat.plastic) {
    out.sigma = mat.C * eps_new;
    out.C_alg = mat.C;
    out.D = mat.C.inverse();
    out.deps_res = Vec6::Zero();
    return out;
  }
  Vec6 eps_e_trial = eps_new - prior.eps_p;
  Vec6 sig_trial = mat.C * eps_e_trial;
  Vec6 i6 = Vec6::Zero();
  i6(0) = i6(1) = i6(2) = 1.0;
  double p = sig_trial.head<3>().sum() / 3.0;
  Vec6 s = sig_trial - p * i6;
  double snorm = s.norm();
  double q_trial = std::sqrt(1.5) * snorm;
  double fy = q_trial - yield_stress(mat.law, prior.eps_p_eq);
  if (fy <= 0.0) {
    out.sigma = sig_trial;
    out.C_alg = mat.C;
    out.D = mat.C.inverse();
    out.deps_res = deps - out.D * (out.sigma - sig_old);
    return out;
  }
  double dg = solve_return(mat, q_trial, prior.eps_p_eq);
  Vec6 m = s / snorm;
  // Flow increment: sqrt(3/2) dg along the unit deviator direction.
  Vec6 deps_p = std::sqrt(1.5) * dg * m;
  out.state.eps_p = prior.eps_p + deps_p;
  out.state.eps_p_eq = prior.eps_p_eq + dg;
  out.sigma = sig_trial - 2.0 * mat.shear * deps_p;

  double G = mat.shear, K = mat.bulk;
  double h = hardening_modulus(mat.law, out.state.eps_p_eq);
  Mat6 J = (i6 * i6.transpose()) / 3.0;
  Mat6 Kdev = Mat6::Identity() - J;
  double theta = 1.0 - 3.0 * G * dg / q_trial;
  double coef = 6.0 * G * G * (1.0 / (3.0 * G + h) - dg / q_trial);
  out.C_alg = 3.0 * K * J + 2.0 * G * theta * Kdev - coef * (m * m.transpose());
  out.D = out.C_alg.inverse();
  out.deps_res = deps - out.D * (out.sigma - sig_old);
  return out;
}

}  // namespace dmn
