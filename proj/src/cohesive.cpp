#include "dmn/cohesive.hpp"

#include <cmath>
#include <stdexcept>

namespace dmn {

CohesiveState make_cohesive_state(const CohesiveParams& p) {
  CohesiveState s;
  s.d_0 = p.d_c();
  s.t_0 = p.t_c;
  s.D_v = 1.0;
  return s;
}

double effective_opening(const Vec3& d, const Vec3& n_c, double beta) {
  double dn = d.dot(n_c);
  double ds2 = (d - dn * n_c).squaredNorm();
  if (dn >= 0.0) return std::sqrt(dn * dn + beta * beta * ds2);
  return beta * std::sqrt(ds2);
}

double effective_traction(const Vec3& t, const Vec3& n_c, double beta) {
  double tn = t.dot(n_c);
  double ts2 = (t - tn * n_c).squaredNorm();
  if (tn >= 0.0) return std::sqrt(tn * tn + ts2 / (beta * beta));
  return std::sqrt(ts2) / beta;
}

double backbone_traction(const CohesiveParams& p, double d_m) {
  double dc = p.d_c(), df = p.d_f();
  if (d_m <= dc) return p.K * d_m;
  if (d_m >= df) return 0.0;
  return p.t_c * (df - d_m) / (df - dc);
}

namespace {

double backbone_slope(const CohesiveParams& p, double d_m) {
  double dc = p.d_c(), df = p.d_f();
  if (d_m <= dc) return p.K;
  if (d_m >= df) return 0.0;
  return -p.t_c / (df - dc);
}

}  // namespace

TractionResult evaluate_cohesive(const CohesiveParams& p,
                                 const CohesiveState& prior, const Vec3& dd,
                                 double dt) {
  TractionResult out;
  CohesiveState& s = out.state;
  s = prior;
  s.d = prior.d + dd;
  double dn = s.d(2);
  Eigen::Vector2d dS = s.d.head<2>();
  bool tension = dn >= 0.0;
  double b2 = p.beta * p.beta;
  double d_m = tension ? std::sqrt(dn * dn + b2 * dS.squaredNorm())
                       : p.beta * dS.norm();

  bool loading = d_m > s.d_0;
  if (loading) {
    s.d_0 = d_m;
    s.t_0 = backbone_traction(p, d_m);
  }
  double hard0 = p.t_c + p.K_h * (s.d_0 - p.d_c());
  double D = s.t_0 / hard0;
  s.D_v = (p.tau * prior.D_v + dt * D) / (p.tau + dt);
  double secant = hard0 / s.d_0;  // d_0 >= d_c > 0

  double t_m, slope;  // effective traction and d t_m / d d_m
  if (loading) {
    t_m = s.D_v * hard0 + p.kappa * d_m;  // hard0 = t_c + K_h (d_m - d_c) here
    slope = (p.tau * prior.D_v * p.K_h + dt * backbone_slope(p, d_m)) /
                (p.tau + dt) +
            p.kappa;
  } else {
    t_m = (s.D_v * secant + p.kappa) * d_m;
    slope = s.D_v * secant + p.kappa;
  }
  double g = d_m > 0.0 ? t_m / d_m : s.D_v * secant + p.kappa;

  Mat3 Ktan = Mat3::Zero();
  if (tension) {
    Vec3 W(b2, b2, 1.0);
    Vec3 Wd = W.asDiagonal() * s.d;
    Ktan = g * Mat3(W.asDiagonal());
    if (d_m > 0.0) Ktan += ((slope - g) / (d_m * d_m)) * (Wd * Wd.transpose());
    out.traction = g * Wd;
  } else {
    Eigen::Vector2d WdS = b2 * dS;
    Ktan.topLeftCorner<2, 2>() = g * b2 * Eigen::Matrix2d::Identity();
    if (d_m > 0.0) {
      Ktan.topLeftCorner<2, 2>() +=
          ((slope - g) / (d_m * d_m)) * (WdS * WdS.transpose());
    }
    Ktan(2, 2) = p.K;
    out.traction.head<2>() = g * WdS;
    out.traction(2) = p.K * dn;
  }
  Eigen::FullPivLU<Mat3> lu(Ktan);
  if (!lu.isInvertible()) {
    throw std::runtime_error("cohesive tangent is singular");
  }
  out.G = lu.inverse();
  out.dd_res = dd - out.G * (out.traction - prior.traction);
  s.traction = out.traction;
  return out;
}

double cohesive_energy(const CohesiveParams& p, const CohesiveState& s) {
  double dc = p.d_c();
  double d_env = std::min(s.d_0, p.d_f());
  return 0.5 * p.t_c * dc + 0.5 * (p.t_c + s.t_0) * (d_env - dc) -
         0.5 * s.t_0 * s.d_0;
}

Mat3 crack_frame(const Vec3& n_c) {
  if (std::abs(n_c.norm() - 1.0) > 1e-8) {
    throw std::invalid_argument("crack normal must be a unit vector");
  }
  int imin = 0;
  n_c.cwiseAbs().minCoeff(&imin);
  Vec3 helper = Vec3::Unit(imin);
  Vec3 s = (helper - helper.dot(n_c) * n_c).normalized();
  Vec3 t = n_c.cross(s);
  Mat3 Q;
  Q.col(0) = s;
  Q.col(1) = t;
  Q.col(2) = n_c;
  return Q;
}

Eigen::Matrix<double, 6, 3> crack_rotation(const Vec3& n_c) {
  Eigen::Matrix<double, 6, 3> N = Eigen::Matrix<double, 6, 3>::Zero();
  N(2, 2) = 1.0;
  N(3, 1) = 1.0 / kSqrt2;
  N(4, 0) = 1.0 / kSqrt2;
  return mandel_rotation(crack_frame(n_c)) * N;
}

EnrichedResponse enrich_cell_response(
    const Mat6& D_base, const Vec6& deps_res,
    const std::vector<CrackContribution>& cracks) {
  if (cracks.size() > 4) {
    throw std::invalid_argument("at most 4 cracks per cell");
  }
  Mat6 B = D_base;
  Vec6 extra = deps_res;
  for (const auto& c : cracks) {
    B += c.v_c * c.R * c.G * c.R.transpose();
    extra += c.v_c * (c.R * c.dd_res);
  }
  Eigen::FullPivLU<Mat6> lu(B);
  if (!lu.isInvertible()) {
    throw std::runtime_error("enriched compliance is singular");
  }
  EnrichedResponse out;
  out.C = lu.inverse();
  out.dsig = -out.C * extra;
  return out;
}

}  // namespace dmn
