#include <cmath>
#include <random>

#include "doctest.h"
#include "dmn/materials.hpp"

using namespace dmn;

namespace {

std::mt19937_64 rng(99);

double urand(double lo, double hi) {
  return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

HardeningLaw table1_matrix_law() {
  // 0.1 + 10 eps_p below 0.01, then 0.18 + 2 eps_p.
  PiecewiseLinearHardening h;
  h.points = {{0.0, 0.1}, {0.01, 0.2}, {0.02, 0.22}};
  return h;
}

Material table1_matrix() { return make_plastic(100.0, 0.3, table1_matrix_law()); }

// Uniaxial-stress response of von Mises with isotropic hardening:
// eps = sigma/E + eps_p with sigma = sigma_y(eps_p); integrated with tiny
// strain steps.
double uniaxial_oracle(const Material& m, double eps_target) {
  double E = m.E_ref;
  double eps = 0.0, eps_p = 0.0, sigma = 0.0;
  const double de = 1e-6;
  while (eps < eps_target - 0.5 * de) {
    eps += de;
    double trial = sigma + E * de;
    double sy = yield_stress(m.law, eps_p);
    if (trial > sy) {
      double H = hardening_modulus(m.law, eps_p);
      double dg = (trial - sy) / (E + H);
      eps_p += dg;
      sigma = yield_stress(m.law, eps_p);
    } else {
      sigma = trial;
    }
  }
  return sigma;
}

// Drives the tensor model in uniaxial stress by Newton on the lateral
// strain; returns sigma_11 and the final state.
std::pair<double, PlasticState> drive_uniaxial(const Material& m, double e11,
                                               int nsteps) {
  PlasticState st;
  Vec6 eps = Vec6::Zero();
  for (int i = 1; i <= nsteps; ++i) {
    double target = e11 * i / nsteps;
    Vec6 deps = Vec6::Zero();
    deps(0) = target - eps(0);
    deps(1) = deps(2) = -0.3 * deps(0);  // initial guess
    BaseEvaluation ev;
    for (int it = 0; it < 50; ++it) {
      ev = evaluate_base(m, st, eps, deps);
      Eigen::Vector2d r(ev.sigma(1), ev.sigma(2));
      if (r.cwiseAbs().maxCoeff() < 1e-12) break;
      Eigen::Matrix2d J = ev.C_alg.block<2, 2>(1, 1);
      Eigen::Vector2d d = J.partialPivLu().solve(-r);
      deps(1) += d(0);
      deps(2) += d(1);
    }
    eps += deps;
    st = ev.state;
  }
  Vec6 deps = Vec6::Zero();
  BaseEvaluation fin = evaluate_base(m, st, eps, deps);
  return {fin.sigma(0), st};
}

}  // namespace

TEST_CASE("hardening laws evaluate exactly") {
  HardeningLaw pw = table1_matrix_law();
  CHECK(yield_stress(pw, 0.0) == doctest::Approx(0.1));
  CHECK(yield_stress(pw, 0.005) == doctest::Approx(0.15));
  CHECK(yield_stress(pw, 0.01) == doctest::Approx(0.2));
  CHECK(yield_stress(pw, 0.05) == doctest::Approx(0.18 + 2.0 * 0.05));
  CHECK(hardening_modulus(pw, 0.005) == doctest::Approx(10.0));
  CHECK(hardening_modulus(pw, 0.015) == doctest::Approx(2.0));

  ExponentialHardening ex{0.025, 0.115, 0.01, 140.0};
  HardeningLaw exl = ex;
  CHECK(yield_stress(exl, 0.0) == doctest::Approx(0.025));
  // Asymptotic slope tends to E_h.
  double s1 = yield_stress(exl, 1.0), s2 = yield_stress(exl, 1.001);
  CHECK((s2 - s1) / 0.001 == doctest::Approx(0.01).epsilon(1e-6));
  CHECK_THROWS_AS(yield_stress(exl, -0.1), std::invalid_argument);
}

TEST_CASE("orthotropic stiffness reproduces its compliance entries") {
  Mat6 C = orthotropic_stiffness(245.0, 19.8, 19.8, 5.9, 29.2, 29.2, 0.023,
                                 0.023, 0.67);
  Mat6 S = C.inverse();
  CHECK(S(0, 0) == doctest::Approx(1.0 / 245.0).epsilon(1e-12));
  CHECK(S(1, 1) == doctest::Approx(1.0 / 19.8).epsilon(1e-12));
  CHECK(S(3, 3) == doctest::Approx(1.0 / (2.0 * 5.9)).epsilon(1e-12));
  CHECK(S(0, 1) == doctest::Approx(-0.023 / 19.8).epsilon(1e-12));
  CHECK(S(1, 2) == doctest::Approx(-0.67 / 19.8).epsilon(1e-12));
}

TEST_CASE("elastic phases are affine with zero residual") {
  Material m = make_elastic_isotropic(500.0, 0.3);
  PlasticState st;
  Vec6 eps_old = Vec6::Zero();
  Vec6 deps;
  for (int i = 0; i < 6; ++i) deps(i) = urand(-0.01, 0.01);
  BaseEvaluation ev = evaluate_base(m, st, eps_old, deps);
  CHECK((ev.sigma - m.C * deps).norm() < 1e-12);
  CHECK(ev.deps_res.norm() < 1e-14);
}

TEST_CASE("hydrostatic strain never yields") {
  Material m = table1_matrix();
  PlasticState st;
  Vec6 deps = Vec6::Zero();
  deps(0) = deps(1) = deps(2) = 0.05;
  BaseEvaluation ev = evaluate_base(m, st, Vec6::Zero(), deps);
  CHECK(ev.state.eps_p_eq == 0.0);
  CHECK((ev.C_alg - m.C).norm() < 1e-12);
}

TEST_CASE("uniaxial tension follows the hardening branch") {
  Material m = table1_matrix();
  for (double e11 : {0.005, 0.015, 0.03}) {
    auto [sig, st] = drive_uniaxial(m, e11, 40);
    double ref = uniaxial_oracle(m, e11);
    CHECK(std::abs(sig - ref) / ref < 1e-4);
    if (e11 >= 0.015) {
      // Past the breakpoint the stress sits on the second branch.
      CHECK(sig == doctest::Approx(0.18 + 2.0 * st.eps_p_eq).epsilon(1e-6));
    }
  }
}

TEST_CASE("radial return: consistency, dissipation, affine identity") {
  Material m = table1_matrix();
  for (int k = 0; k < 30; ++k) {
    PlasticState st;
    st.eps_p_eq = urand(0.0, 0.03);
    Vec6 eps_old = Vec6::Zero();
    Vec6 deps;
    for (int i = 0; i < 6; ++i) deps(i) = urand(-0.02, 0.02);
    BaseEvaluation ev = evaluate_base(m, st, eps_old, deps);
    // Yield consistency after return.
    Vec6 i6 = Vec6::Zero();
    i6(0) = i6(1) = i6(2) = 1.0;
    Vec6 s = ev.sigma - (ev.sigma.head<3>().sum() / 3.0) * i6;
    double q = std::sqrt(1.5) * s.norm();
    CHECK(q - yield_stress(m.law, ev.state.eps_p_eq) <= 1e-8);
    // Plastic dissipation increment is non-negative.
    CHECK(ev.sigma.dot(ev.state.eps_p - st.eps_p) >= -1e-12);
    // Affine identity at the converged state.
    Vec6 sig_old = m.C * (eps_old - st.eps_p);
    Vec6 lhs = ev.D * (ev.sigma - sig_old) + ev.deps_res;
    CHECK((lhs - deps).norm() < 1e-10);
  }
}

TEST_CASE("consistent tangent matches finite differences") {
  Material m = table1_matrix();
  PlasticState st;
  Vec6 eps_old = Vec6::Zero();
  Vec6 deps;
  deps << 0.01, -0.002, 0.001, 0.004, -0.003, 0.002;  // plastic step
  BaseEvaluation ev = evaluate_base(m, st, eps_old, deps);
  REQUIRE(ev.state.eps_p_eq > 0.0);
  double h = 1e-7;
  for (int i = 0; i < 6; ++i) {
    Vec6 dp = deps, dm = deps;
    dp(i) += h;
    dm(i) -= h;
    Vec6 fd = (evaluate_base(m, st, eps_old, dp).sigma -
               evaluate_base(m, st, eps_old, dm).sigma) /
              (2.0 * h);
    CHECK((fd - ev.C_alg.col(i)).norm() / ev.C_alg.col(i).norm() < 1e-4);
  }
}
