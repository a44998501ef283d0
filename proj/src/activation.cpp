#include "dmn/activation.hpp"

#include <cmath>
#include <numbers>

#include "dmn/cohesive.hpp"

namespace dmn {

namespace {

double plane_traction(double sbar, double tbar, double theta, double beta) {
  double sn = sbar + tbar * std::cos(2.0 * theta);
  double tn = std::abs(tbar * std::sin(2.0 * theta));
  if (sn > 0.0) return std::sqrt(sn * sn + tn * tn / (beta * beta));
  return tn / beta;
}

}  // namespace

std::vector<CrackCandidate> critical_planes(const Vec6& stress, double beta) {
  EigSym3 eig = eig_sym3(from_mandel(stress));
  double s1 = eig.values(0), s3 = eig.values(2);
  double sbar = 0.5 * (s1 + s3);
  double tbar = 0.5 * (s1 - s3);
  double scale = std::max({std::abs(s1), std::abs(s3), 1e-300});
  if (tbar <= 1e-12 * scale) {
    // Hydrostatic state: every plane is equivalent.
    return {{eig.vectors.col(0), std::max(sbar, 0.0), 0.0}};
  }
  std::vector<double> thetas = {0.0, std::numbers::pi / 4.0};
  if (beta < 1.0 && sbar > 0.0) {
    double ratio = sbar / (tbar * (1.0 / (beta * beta) - 1.0));
    if (ratio > 0.0 && ratio < 1.0) {
      thetas.push_back(0.5 * std::acos(ratio));
    }
  }
  double best_tm = -1.0;
  double best_theta = 0.0;
  for (double th : thetas) {
    double tm = plane_traction(sbar, tbar, th, beta);
    if (tm > best_tm) {  // ties keep the earlier angle (theta = 0 first)
      best_tm = tm;
      best_theta = th;
    }
  }
  std::vector<CrackCandidate> out;
  const Vec3 e1 = eig.vectors.col(0), e3 = eig.vectors.col(2);
  Vec3 n = std::cos(best_theta) * e1 + std::sin(best_theta) * e3;
  out.push_back({n.normalized(), best_tm, best_theta});
  if (best_theta != 0.0) {
    Vec3 n2 = std::cos(best_theta) * e1 - std::sin(best_theta) * e3;
    out.push_back({n2.normalized(), best_tm, -best_theta});
  }
  return out;
}

std::vector<ActivationEvent> try_activate(
    const std::vector<CellCandidateInput>& cells) {
  constexpr double kCosAllow = std::numbers::sqrt2 / 2.0;
  int best_cell = -1;
  double best_margin = 0.0;
  std::vector<CrackCandidate> best_cands;
  for (int i = 0; i < (int)cells.size(); ++i) {
    const auto& cell = cells[i];
    if (cell.existing.size() >= 4) continue;
    std::vector<CrackCandidate> cands = critical_planes(cell.stress, cell.beta);
    std::vector<CrackCandidate> admissible;
    for (const auto& c : cands) {
      bool ok = true;
      for (const auto& n : cell.existing) {
        if (std::abs(c.n_c.dot(n)) >= kCosAllow) {
          ok = false;
          break;
        }
      }
      if (ok) admissible.push_back(c);
    }
    if (admissible.empty()) continue;
    double margin = admissible.front().t_m - cell.t_c;
    if (margin > best_margin) {  // strict: index tie-break to the lower cell
      best_margin = margin;
      best_cell = i;
      best_cands = admissible;
    }
  }
  std::vector<ActivationEvent> out;
  if (best_cell < 0) return out;
  const auto& cell = cells[best_cell];
  double perturb = 1.0;
  for (const auto& c : best_cands) {
    ActivationEvent ev;
    ev.cell = best_cell;
    ev.n_c = c.n_c;
    ev.t_m = c.t_m;
    ev.t_c = cell.t_c *
             (best_cands.size() > 1 ? 1.0 + perturb * 1e-6 : 1.0);
    perturb = -perturb;
    ev.v_c = reciprocal_length(cell.A, c.n_c);
    ev.area = cutting_area(cell.A, c.n_c);
    // Equilibrium-preserving initial opening d = (sigma . n_c) / K,
    // expressed in the crack frame.
    Vec3 t_global = from_mandel(cell.stress) * c.n_c;
    ev.d_init = crack_frame(c.n_c).transpose() * t_global / cell.K;
    out.push_back(ev);
  }
  return out;
}

}  // namespace dmn
