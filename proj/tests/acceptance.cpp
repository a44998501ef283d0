// Acceptance suite: each criterion prints exactly one PASS/FAIL line and the
// process exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dmn/activation.hpp"
#include "dmn/cohesive.hpp"
#include "dmn/io.hpp"
#include "dmn/network.hpp"
#include "dmn/scale_geometry.hpp"
#include "dmn/solver.hpp"
#include "dmn/training.hpp"

using namespace dmn;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  if (!pass) ++g_failures;
}

double urand(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

Mat3 random_spd(std::mt19937_64& rng) {
  Mat3 B;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) B(i, j) = urand(rng, -1.0, 1.0);
  }
  Eigen::HouseholderQR<Mat3> qr(B);
  Mat3 Q = qr.householderQ();
  Mat3 A = Mat3::Zero();
  Mat3 D = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    D(i, i) = std::exp(urand(rng, std::log(0.1), std::log(10.0)));
  }
  A = Q * D * Q.transpose();
  return 0.5 * (A + A.transpose());
}

Vec3 random_unit(std::mt19937_64& rng) {
  while (true) {
    Vec3 n(urand(rng, -1, 1), urand(rng, -1, 1), urand(rng, -1, 1));
    double l = n.norm();
    if (l > 0.1 && l < 1.0) return n / l;
  }
}

// ---------------------------------------------------------------- 1 -------

void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double worst_area = 0.0, worst_vol = 0.0, worst_psd = 0.0, worst_rot = 0.0;
  for (int k = 0; k < 1000; ++k) {
    Mat3 A0 = random_spd(rng);
    double f1 = urand(rng, 0.05, 0.95);
    Vec3 n = random_unit(rng);
    CellDivisionResult d = divide_cell(A0, f1, n);
    double S0 = cutting_area(A0, n);
    worst_area = std::max(worst_area,
                          std::abs(cutting_area(d.first, n) - S0) / S0);
    worst_area = std::max(worst_area,
                          std::abs(cutting_area(d.second, n) - S0) / S0);
    double V0 = cell_volume(A0);
    worst_vol = std::max(worst_vol,
                         std::abs(cell_volume(d.first) - f1 * V0) / V0);
    worst_vol = std::max(
        worst_vol, std::abs(cell_volume(d.second) - (1.0 - f1) * V0) / V0);
    for (const Mat3& Ac : {d.first, d.second}) {
      Eigen::SelfAdjointEigenSolver<Mat3> es(Mat3(Ac - A0));
      worst_psd = std::max(worst_psd, -es.eigenvalues()(0) / A0.norm());
    }
    Mat3 R = euler_rotation(urand(rng, -3, 3), urand(rng, -3, 3),
                            urand(rng, -3, 3));
    CellDivisionResult dr =
        divide_cell(Mat3(R * A0 * R.transpose()), f1, Vec3(R * n));
    worst_rot = std::max(
        worst_rot,
        (dr.first - R * d.first * R.transpose()).norm() / d.first.norm());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  bool pass = worst_area < 1e-10 && worst_vol < 1e-10 && worst_psd < 1e-9 &&
              worst_rot < 1e-10 && secs < 5.0;
  std::ostringstream os;
  os << "1000 cell divisions: area err " << worst_area << ", volume err "
     << worst_vol << ", containment defect " << worst_psd << ", equivariance "
     << worst_rot << ", " << secs << " s";
  report(1, pass, os.str());
}

// ---------------------------------------------------------------- 2 -------

void criterion_2() {
  std::mt19937_64 rng(102);
  double worst_exact = 0.0, worst_cross = 0.0;
  for (double h : {0.008, 0.1, 1.0, 10.0}) {
    ScaleTensor A = sphere_scale_tensor(h);
    for (int k = 0; k < 10; ++k) {
      Vec3 n = random_unit(rng);
      double vc = reciprocal_length(A, n);
      worst_exact = std::max(worst_exact, std::abs(vc - 1.0 / h) * h);
      double cross = 2.0 * cutting_area(A, n) / (3.0 * cell_volume(A));
      worst_cross = std::max(worst_cross, std::abs(vc - cross) * h);
    }
  }
  bool pass = worst_exact < 1e-12 && worst_cross < 1e-10;
  std::ostringstream os;
  os << "reciprocal length on spheres: closed-form err " << worst_exact
     << ", 2S/3V cross-check err " << worst_cross;
  report(2, pass, os.str());
}

// ---------------------------------------------------------------- 3 -------

void criterion_3() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(103);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  double worst = -1.0;
  for (int k = 0; k < 500; ++k) {
    Mat3 a;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a(i, j) = urand(rng, -1, 1);
    }
    Mat3 sig = 0.5 * (a + a.transpose());
    for (double beta : {0.5, 1.0, 2.0}) {
      auto cands = critical_planes(to_mandel(sig), beta);
      double best = 0.0;
      for (const auto& c : cands) best = std::max(best, c.t_m);
      double brute = 0.0;
      for (int i = 0; i < 10000; ++i) {
        double z = 1.0 - 2.0 * (i + 0.5) / 10000.0;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = golden * i;
        Vec3 n(r * std::cos(phi), r * std::sin(phi), z);
        brute = std::max(brute, effective_traction(sig * n, n, beta));
      }
      if (brute > 1e-12) {
        worst = std::max(worst, (brute - best) / brute);
      }
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  bool pass = worst < 1e-3 && secs < 30.0;
  std::ostringstream os;
  os << "critical-plane search vs 1e4-normal brute force: worst deficit "
     << worst << ", " << secs << " s";
  report(3, pass, os.str());
}

// ---------------------------------------------------------------- 4 -------

CohesiveParams table1_cohesive(double tau) {
  CohesiveParams p;
  p.t_c = 0.15;
  p.G_c = 6e-4;
  p.beta = 1.0;
  p.tau = tau;
  return p;
}

void criterion_4() {
  CohesiveParams p = table1_cohesive(1.0);
  double area = 0.0;
  for (auto [lo, hi] : {std::pair{0.0, p.d_c()}, {p.d_c(), p.d_f()}}) {
    int n = 40000;
    for (int i = 0; i < n; ++i) {
      double a = lo + (hi - lo) * i / n;
      double b = lo + (hi - lo) * (i + 1) / n;
      area += 0.5 * (backbone_traction(p, a) + backbone_traction(p, b)) *
              (b - a);
    }
  }
  double e_err = std::abs(area - p.G_c) / p.G_c;
  double df_err = std::abs(p.d_f() - 0.008) / 0.008;
  bool pass = e_err < 1e-8 && df_err < 1e-14;
  std::ostringstream os;
  os << "cohesive backbone: integrated energy err " << e_err
     << ", full-separation opening err " << df_err;
  report(4, pass, os.str());
}

// ---------------------------------------------------------------- 5 -------

void criterion_5() {
  double dt = 0.01;
  CohesiveParams p = table1_cohesive(dt / 100.0);
  CohesiveState s = make_cohesive_state(p);
  int n = 400;
  double d_end = 1.2 * p.d_f();
  double worst = 0.0;
  for (int i = 1; i <= n; ++i) {
    TractionResult r = evaluate_cohesive(p, s, Vec3(0, 0, d_end / n), dt);
    s = r.state;
    double d = d_end * i / n;
    double ref = backbone_traction(p, d) + p.kappa * d;
    worst = std::max(worst, std::abs(r.traction(2) - ref));
  }

  CohesiveParams q = table1_cohesive(1.0);
  q.K_h = 0.0;
  CohesiveState f = make_cohesive_state(q);
  f.t_0 = 0.5 * q.t_c;
  f.d_0 = q.d_f() - 0.5 * (q.d_f() - q.d_c());
  f.d = Vec3(0, 0, 0.5 * f.d_0);
  f.D_v = 1.0;
  TractionResult r = evaluate_cohesive(q, f, Vec3::Zero(), q.tau);
  double fixture_err = std::abs(r.state.D_v - 0.75);

  bool pass = worst < 0.01 * p.t_c && fixture_err < 1e-14;
  std::ostringstream os;
  os << "viscous regularization: ramp deviation " << worst << " GPa (1% t_c = "
     << 0.01 * p.t_c << "), backward-Euler fixture err " << fixture_err;
  report(5, pass, os.str());
}

// ---------------------------------------------------------------- 6 -------

// Independent laminate reference: solve the 12-unknown system (6 strains per
// child) built from 6 interface conditions and 6 volume-average constraints.
Mat6 laminate_reference(const Mat6& C1, const Mat6& C2, double f1) {
  Mat6 Ch;
  for (int col = 0; col < 6; ++col) {
    Vec6 eps = Vec6::Unit(col);
    Eigen::Matrix<double, 12, 12> M = Eigen::Matrix<double, 12, 12>::Zero();
    Eigen::Matrix<double, 12, 1> b = Eigen::Matrix<double, 12, 1>::Zero();
    int row = 0;
    for (int m : {0, 1, 5}) {  // in-plane strain continuity
      M(row, m) = 1.0;
      M(row, 6 + m) = -1.0;
      ++row;
    }
    for (int m : {2, 3, 4}) {  // traction equilibrium across the interface
      for (int k = 0; k < 6; ++k) {
        M(row, k) = C1(m, k);
        M(row, 6 + k) = -C2(m, k);
      }
      ++row;
    }
    for (int m = 0; m < 6; ++m) {  // volume average recovers the block strain
      M(row, m) = f1;
      M(row, 6 + m) = 1.0 - f1;
      b(row) = eps(m);
      ++row;
    }
    Eigen::Matrix<double, 12, 1> x = M.fullPivLu().solve(b);
    Vec6 e1 = x.head<6>(), e2 = x.tail<6>();
    Ch.col(col) = f1 * (C1 * e1) + (1.0 - f1) * (C2 * e2);
  }
  return Ch;
}

void criterion_6() {
  std::mt19937_64 rng(106);
  OrthotropicRanges ranges;
  double worst = 0.0, worst_bound = 0.0;
  for (int k = 0; k < 200; ++k) {
    auto [C1, C2] = sample_phases(rng, ranges, ranges);
    double f1 = urand(rng, 0.1, 0.9);
    Mat6 Ch = homogenize_block({C1, Vec6::Zero()}, {C2, Vec6::Zero()}, f1).C;
    Mat6 ref = laminate_reference(C1, C2, f1);
    worst = std::max(worst, (Ch - ref).norm() / ref.norm());
    Mat6 voigt = f1 * C1 + (1.0 - f1) * C2;
    Mat6 reuss = (f1 * C1.inverse() + (1.0 - f1) * C2.inverse()).inverse();
    Eigen::SelfAdjointEigenSolver<Mat6> hi(voigt - Ch), lo(Ch - reuss);
    worst_bound = std::max(worst_bound,
                           -hi.eigenvalues()(0) / voigt.norm());
    worst_bound = std::max(worst_bound,
                           -lo.eigenvalues()(0) / voigt.norm());
  }
  bool pass = worst < 1e-10 && worst_bound < 1e-10;
  std::ostringstream os;
  os << "laminate vs 12-unknown reference: worst rel err " << worst
     << ", worst bound violation " << worst_bound;
  report(6, pass, os.str());
}

// ---------------------------------------------------------------- 7 -------

void criterion_7() {
  std::mt19937_64 rng(107);
  OrthotropicRanges ranges;
  double worst = 0.0;
  for (int cfg = 0; cfg < 20; ++cfg) {
    NetworkParams net = random_params(3, rng);
    std::vector<std::pair<Mat6, Mat6>> pairs;
    for (int i = 0; i < 4; ++i) pairs.push_back(sample_phases(rng, ranges, ranges));
    auto samples = oracle_labels(pairs, make_laminate_oracle(0.45));
    ParamGradient g = gradient(net, samples);
    Eigen::VectorXd an(net.num_leaves() + 3 * net.num_nodes());
    Eigen::VectorXd fd(an.size());
    int idx = 0;
    double h = 1e-6;
    for (int j = 0; j < net.num_leaves(); ++j, ++idx) {
      an(idx) = g.z[j];
      NetworkParams p = net, m = net;
      p.z[j] += h;
      m.z[j] -= h;
      fd(idx) = (cost(p, samples) - cost(m, samples)) / (2.0 * h);
    }
    for (int v = 0; v < net.num_nodes(); ++v) {
      for (int t = 0; t < 3; ++t, ++idx) {
        an(idx) = g.angles[v](t);
        NetworkParams p = net, m = net;
        p.angles[v](t) += h;
        m.angles[v](t) -= h;
        fd(idx) = (cost(p, samples) - cost(m, samples)) / (2.0 * h);
      }
    }
    worst = std::max(worst, (an - fd).norm() / fd.norm());
  }
  bool pass = worst < 1e-5;
  std::ostringstream os;
  os << "analytic vs finite-difference gradients, 20 depth-3 networks: worst "
     << worst;
  report(7, pass, os.str());
}

// ---------------------------------------------------------------- 8 -------

void criterion_8() {
  auto t0 = std::chrono::steady_clock::now();
  OrthotropicRanges ranges;

  // Depth-4 student recovers a depth-2 teacher.
  std::mt19937_64 rng(11);
  NetworkParams teacher = random_params(2, rng);
  std::mt19937_64 srng(21);
  std::vector<std::pair<Mat6, Mat6>> tr, te;
  for (int i = 0; i < 400; ++i) tr.push_back(sample_phases(srng, ranges, ranges));
  for (int i = 0; i < 100; ++i) te.push_back(sample_phases(srng, ranges, ranges));
  auto train_set = oracle_labels(tr, make_teacher_oracle(teacher));
  auto test_set = oracle_labels(te, make_teacher_oracle(teacher));
  NetworkParams init = random_params(4, rng);
  TrainingConfig cfg;
  cfg.epochs = 80;
  cfg.batch_size = 20;
  cfg.learning_rate = 0.2;
  cfg.decay_every = 50;
  cfg.seed = 99;
  double teacher_J = -1.0;
  try {
    teacher_J = train(cfg, train_set, test_set, init).final_test_J;
  } catch (const std::exception&) {
  }

  // Depth-6 network on laminate-composed labels.
  auto lam_train = oracle_labels(tr, make_laminate_oracle(0.4));
  auto lam_test = oracle_labels(te, make_laminate_oracle(0.4));
  std::mt19937_64 rng6(11);
  NetworkParams init6 = random_params(6, rng6);
  TrainingConfig cfg6;
  cfg6.epochs = 60;
  cfg6.batch_size = 20;
  cfg6.learning_rate = 0.2;
  cfg6.decay_every = 40;
  cfg6.seed = 99;
  double lam_err = -1.0;
  try {
    lam_err = std::sqrt(2.0 * train(cfg6, lam_train, lam_test, init6)
                                  .final_test_J);
  } catch (const std::exception&) {
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  bool pass = teacher_J >= 0.0 && teacher_J < 1e-4 && lam_err >= 0.0 &&
              lam_err < 0.01 && secs < 600.0;
  std::ostringstream os;
  os << "training: teacher-student test J " << teacher_J
     << ", depth-6 laminate test error " << 100.0 * lam_err << "%, " << secs
     << " s";
  report(8, pass, os.str());
}

// ------------------------------------------------------- 9, 10, 11, 12 ----

HardeningLaw table1_matrix_law() {
  PiecewiseLinearHardening h;
  h.points = {{0.0, 0.1}, {0.01, 0.2}, {0.02, 0.22}};
  return h;
}

std::vector<PhaseSpec> study_phases(double tau) {
  PhaseSpec m;
  m.material = make_plastic(100.0, 0.3, table1_matrix_law());
  m.breakable = true;
  m.cohesive = table1_cohesive(tau);
  PhaseSpec p;
  p.material = make_elastic_isotropic(500.0, 0.3);
  return {m, p};
}

// Deterministic two-phase study network: the root divides the cell across
// the pull axis so the all-matrix subtree forms a series path that caps the
// macroscale strength; the other subtree mixes matrix and stiff elastic
// particles.
NetworkParams study_net() {
  NetworkParams p;
  p.depth = 4;
  p.z = {0.6, 0.5, 0.7, 0.4, 0.8, 0.55, 0.5, 0.35};
  p.angles.assign(15, Vec3::Zero());
  const double hp = std::numbers::pi / 2;
  double a[15][3] = {
      {hp, 0.0, 0.0},
      {0.2, 0.1, 0.0},   {-0.3, 0.2, 0.1},
      {0.5, -0.2, 0.3},  {-0.4, 0.3, -0.1}, {0.7, 0.1, 0.2},
      {-0.6, -0.3, 0.1}, {0.1, 0.4, -0.2},  {-0.2, -0.1, 0.3},
      {0.3, 0.2, -0.3},  {-0.5, 0.1, 0.2},  {0.4, -0.3, 0.1},
      {-0.1, 0.2, -0.2}, {0.6, 0.3, 0.0},   {-0.3, -0.2, 0.2}};
  for (int v = 0; v < 15; ++v) p.angles[v] = Vec3(a[v][0], a[v][1], a[v][2]);
  p.phase = {0, 0, 0, 0, 0, 1, 0, 1};
  return p;
}

struct StudyRun {
  double peak = 0.0;
  double released = 0.0;
  double worst_hm = 0.0;
  int cracks = 0;
  bool ok = true;
};

StudyRun run_study(double h, double eps_max, int steps, double sign) {
  const double dt = 1e-3;
  NetworkState st = make_network_state(study_net(), sphere_scale_tensor(h),
                                       study_phases(dt / 10.0));
  SolverOptions opt;
  StudyRun out;
  for (int i = 0; i < steps; ++i) {
    MacroBC bc;
    bc.strain_control = {true, false, false, false, false, false};
    bc.target = Vec6::Zero();
    bc.target(0) = sign * eps_max / steps;
    bc.dt = dt;
    StepResult r = solve_step_adaptive(st, bc, opt);
    if (!r.converged) {
      out.ok = false;
      break;
    }
    double denom = std::max(
        {std::abs(r.work_macro), std::abs(r.work_micro), 1e-18});
    out.worst_hm = std::max(out.worst_hm,
                            std::abs(r.work_macro - r.work_micro) / denom);
    out.peak = std::max(out.peak, std::abs(st.sig_macro(0)));
  }
  out.released = diagnostics(st).released_energy;
  out.cracks = (int)st.cracks.size();
  return out;
}

void criteria_9_to_12() {
  auto t0 = std::chrono::steady_clock::now();
  double worst_hm = 0.0;
  bool all_ok = true;

  // Tension to full failure over the h sweep of the energy study.
  std::vector<double> hs = {0.3, 1.0, 3.0, 10.0};
  std::vector<double> released;
  for (double h : hs) {
    double emax = std::min(0.06, 0.006 + 0.014 / h + 0.01);
    StudyRun r = run_study(h, emax, 250, 1.0);
    all_ok = all_ok && r.ok;
    worst_hm = std::max(worst_hm, r.worst_hm);
    released.push_back(r.released);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = (int)hs.size();
  for (int i = 0; i < n; ++i) {
    double x = std::log(hs[i]), y = std::log(released[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double secs9 = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                               t0)
                     .count();
  bool pass9 = all_ok && std::abs(slope - 2.0) <= 0.15 && secs9 < 300.0;
  std::ostringstream os9;
  os9 << "released energy vs cell size: log-log slope " << slope << " over h"
      << " in {0.3, 1, 3, 10} mm, " << secs9 << " s";
  report(9, pass9, os9.str());

  StudyRun plateau = run_study(0.01, 0.01, 250, 1.0);
  StudyRun mid = run_study(2.0, 0.024, 250, 1.0);
  worst_hm = std::max({worst_hm, plateau.worst_hm, mid.worst_hm});
  bool pass10 = plateau.ok && mid.ok &&
                std::abs(plateau.peak - 0.15) <= 0.1 * 0.15 &&
                mid.peak < 0.15;
  std::ostringstream os10;
  os10 << "strength plateau: peak " << plateau.peak
       << " GPa at h = 0.01 mm (t_c = 0.15), peak " << mid.peak
       << " GPa at h = 2 mm";
  report(10, pass10, os10.str());

  StudyRun tens = run_study(1.0, 0.031, 250, 1.0);
  StudyRun comp = run_study(1.0, 0.05, 250, -1.0);
  worst_hm = std::max({worst_hm, tens.worst_hm, comp.worst_hm});
  double ratio = comp.peak / tens.peak;
  bool pass11 = tens.ok && comp.ok && ratio >= 1.5;
  std::ostringstream os11;
  os11 << "tension/compression asymmetry: compressive peak " << comp.peak
       << " GPa vs tensile peak " << tens.peak << " GPa (ratio " << ratio
       << ")";
  report(11, pass11, os11.str());

  bool pass12 = all_ok && plateau.ok && mid.ok && tens.ok && comp.ok &&
                worst_hm <= 1e-6;
  std::ostringstream os12;
  os12 << "work balance across the scales on every converged step: worst "
       << worst_hm;
  report(12, pass12, os12.str());
}

// --------------------------------------------------------------- 13 -------

void criterion_13() {
  auto make = [] {
    return make_network_state(study_net(), sphere_scale_tensor(1.0),
                              study_phases(1e-4));
  };
  MacroBC bc;
  bc.strain_control = {true, true, true, true, true, true};
  bc.target = Vec6::Zero();
  bc.target(0) = 0.002;
  bc.dt = 0.01;

  // Force failures of the full span and of the second half-step once; the
  // refinement must then walk the documented sub-step sequence.
  std::vector<std::pair<double, double>> attempts;
  int second_half_fails = 0;
  SolverOptions opt;
  opt.substep_veto = [&](double t0, double t1) {
    attempts.emplace_back(t0, t1);
    if (t0 == 0.0 && t1 == 0.01) return true;
    if (t0 == 0.005 && t1 == 0.01 && second_half_fails == 0) {
      ++second_half_fails;
      return true;
    }
    return false;
  };
  NetworkState st = make();
  StepResult r = solve_step_adaptive(st, bc, opt);
  std::vector<std::pair<double, double>> expected = {
      {0.0, 0.01},      // full step, vetoed
      {0.0, 0.005},     // N = 2, i = 1
      {0.005, 0.01},    // N = 2, i = 2, vetoed
      {0.005, 0.0075},  // N = 4, i = 3
      {0.0075, 0.01}};  // N = 4, i = 4
  bool seq_ok = r.converged && r.substeps == 4 && r.refinements == 2 &&
                attempts.size() == expected.size();
  for (std::size_t i = 0; seq_ok && i < expected.size(); ++i) {
    seq_ok = std::abs(attempts[i].first - expected[i].first) < 1e-15 &&
             std::abs(attempts[i].second - expected[i].second) < 1e-15;
  }

  // Exhaustion restores the pre-step state bit-identically.
  NetworkState a = make();
  SolverOptions plain;
  MacroBC pre = bc;
  solve_step(a, pre, plain);
  NetworkState before = a;
  SolverOptions always;
  int vetoes = 0;
  always.substep_veto = [&](double, double) {
    ++vetoes;
    return true;
  };
  StepResult rx = solve_step_adaptive(a, bc, always);
  bool restore_ok = !rx.converged && rx.refinements == 10;
  restore_ok = restore_ok && a.time == before.time && a.step == before.step;
  restore_ok = restore_ok &&
               (a.eps_macro.array() == before.eps_macro.array()).all() &&
               (a.sig_macro.array() == before.sig_macro.array()).all();
  for (std::size_t j = 0; restore_ok && j < a.cells.size(); ++j) {
    restore_ok = (a.cells[j].eps.array() == before.cells[j].eps.array()).all() &&
                 (a.cells[j].sigma.array() ==
                  before.cells[j].sigma.array()).all() &&
                 a.cells[j].mat_state.eps_p_eq ==
                     before.cells[j].mat_state.eps_p_eq;
  }
  restore_ok = restore_ok && a.cracks.size() == before.cracks.size();

  bool pass = seq_ok && restore_ok;
  std::ostringstream os;
  os << "adaptive refinement: sub-step sequence "
     << (seq_ok ? "matches" : "differs") << ", exhaustion restore "
     << (restore_ok ? "bit-identical" : "differs") << ", depth capped at 10";
  report(13, pass, os.str());
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criteria_9_to_12();
  criterion_13();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 13 criteria passed\n");
  return 0;
}
