#include "dmn/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

namespace dmn {

namespace {

constexpr double kFractionFloor = 1e-9;

// Selector of the traction slots (33, 23, 13) in Mandel ordering.
const Eigen::Matrix<double, 3, 6>& traction_selector() {
  static const Eigen::Matrix<double, 3, 6> T = [] {
    Eigen::Matrix<double, 3, 6> t = Eigen::Matrix<double, 3, 6>::Zero();
    t(0, 2) = t(1, 3) = t(2, 4) = 1.0;
    return t;
  }();
  return T;
}

Mat3 invert_interface(const Mat3& M) {
  double scale = M.cwiseAbs().maxCoeff();
  double det = M.determinant();
  if (!std::isfinite(det) || scale <= 0.0 ||
      std::abs(det) < 1e-12 * scale * scale * scale) {
    throw SingularInterfaceError(
        "two-layer interface subsystem is singular; refine the step");
  }
  return M.inverse();
}

int layer_of(int id) {
  int layer = 1;
  while ((1 << layer) - 1 <= id) ++layer;
  return layer;
}

std::atomic<std::uint64_t> g_stamp{1};

}  // namespace

void NetworkParams::validate() const {
  if (depth < 1) throw std::invalid_argument("network depth must be >= 1");
  if ((int)z.size() != num_leaves() || (int)phase.size() != num_leaves() ||
      (int)angles.size() != num_nodes()) {
    throw std::invalid_argument("network parameter arrays have wrong sizes");
  }
}

std::vector<double> node_weights_raw(const NetworkParams& params) {
  params.validate();
  int n = params.num_nodes();
  std::vector<double> w(n, 0.0);
  for (int j = 0; j < params.num_leaves(); ++j) {
    w[params.leaf_id(j)] = std::max(0.0, params.z[j]);
  }
  for (int v = params.num_leaves() - 2; v >= 0; --v) {
    w[v] = w[2 * v + 1] + w[2 * v + 2];
  }
  return w;
}

std::vector<double> node_weights(const NetworkParams& params) {
  std::vector<double> w = node_weights_raw(params);
  double total = w[0];
  if (total <= 0.0) {
    throw std::invalid_argument("all bottom-layer activations are <= 0");
  }
  for (double& x : w) x /= total;
  return w;
}

BlockResponse homogenize_block(const BlockResponse& r1,
                               const BlockResponse& r2, double f1) {
  if (!(f1 > 0.0 && f1 < 1.0)) {
    throw std::invalid_argument("homogenize_block: f1 must lie in (0,1)");
  }
  const auto& T = traction_selector();
  double f2 = 1.0 - f1;
  Mat6 dC = r1.C - r2.C;
  Mat3 M = T * (f2 * r1.C + f1 * r2.C) * T.transpose();
  Mat3 Minv = invert_interface(M);
  Eigen::Matrix<double, 3, 6> Y = Minv * (T * dC);
  BlockResponse out;
  out.C = f1 * r1.C + f2 * r2.C - f1 * f2 * (dC * T.transpose()) * Y;
  out.dsig = f1 * r1.dsig + f2 * r2.dsig +
             f1 * f2 * (dC * T.transpose()) * (Minv * (T * (r2.dsig - r1.dsig)));
  return out;
}

BlockResponse forward_pass(const NetworkParams& params,
                           const std::vector<double>& weights,
                           const std::vector<BlockResponse>& leaf_responses,
                           ForwardCache& cache) {
  params.validate();
  int n = params.num_nodes();
  if ((int)leaf_responses.size() != params.num_leaves()) {
    throw std::invalid_argument("one leaf response per bottom node required");
  }
  const auto& T = traction_selector();
  cache.blocks.assign(n, {});
  cache.rot.resize(n);
  cache.leaf_resp = leaf_responses;
  cache.laminate_ops = 0;

  std::vector<BlockResponse> up(n);
  for (int v = n - 1; v >= 0; --v) {
    auto& blk = cache.blocks[v];
    if (weights[v] <= 0.0) {
      blk.mode = -1;
      continue;
    }
    BlockResponse local;
    if (v >= params.num_leaves() - 1) {
      local = leaf_responses[v - (params.num_leaves() - 1)];
      blk.mode = 0;
    } else {
      int l = 2 * v + 1, r = 2 * v + 2;
      bool la = weights[l] > 0.0, ra = weights[r] > 0.0;
      if (la && ra) {
        double f1 = weights[l] / weights[v];
        f1 = std::clamp(f1, kFractionFloor, 1.0 - kFractionFloor);
        blk.mode = 0;
        blk.f1 = f1;
        blk.C1 = up[l].C;
        blk.C2 = up[r].C;
        blk.d1 = up[l].dsig;
        blk.d2 = up[r].dsig;
        blk.Minv = invert_interface(
            T * ((1.0 - f1) * blk.C1 + f1 * blk.C2) * T.transpose());
        Mat6 dC = blk.C1 - blk.C2;
        Eigen::Matrix<double, 3, 6> Y = blk.Minv * (T * dC);
        local.C = f1 * blk.C1 + (1.0 - f1) * blk.C2 -
                  f1 * (1.0 - f1) * (dC * T.transpose()) * Y;
        local.dsig = f1 * blk.d1 + (1.0 - f1) * blk.d2 +
                     f1 * (1.0 - f1) * (dC * T.transpose()) *
                         (blk.Minv * (T * (blk.d2 - blk.d1)));
        ++cache.laminate_ops;
      } else if (la) {
        blk.mode = 1;
        local = up[l];
      } else {
        blk.mode = 2;
        local = up[r];
      }
    }
    blk.Ch = local.C;
    blk.dh = local.dsig;
    const Vec3& a = params.angles[v];
    Mat6 P = mandel_rotation(euler_rotation(a(0), a(1), a(2))).transpose();
    cache.rot[v] = P;
    up[v].C = P * local.C * P.transpose();
    up[v].dsig = P * local.dsig;
  }
  if (cache.blocks[0].mode == -1) {
    throw std::invalid_argument("top node carries zero weight");
  }
  cache.stamp = g_stamp.fetch_add(1);
  return up[0];
}

namespace {

void backward_node(const NetworkParams& params,
                   const std::vector<double>& weights,
                   const ForwardCache& cache, int v, const Vec6& eps_mother,
                   std::vector<LeafIncrement>& out) {
  const auto& T = traction_selector();
  const auto& blk = cache.blocks[v];
  Vec6 eps = cache.rot[v].transpose() * eps_mother;
  if (v >= params.num_leaves() - 1) {
    int j = v - (params.num_leaves() - 1);
    out[j].strain = eps;
    out[j].stress = cache.leaf_resp[j].C * eps + cache.leaf_resp[j].dsig;
    return;
  }
  int l = 2 * v + 1, r = 2 * v + 2;
  if (blk.mode == 1) {
    backward_node(params, weights, cache, l, eps, out);
    return;
  }
  if (blk.mode == 2) {
    backward_node(params, weights, cache, r, eps, out);
    return;
  }
  Vec3 jump = blk.Minv * (T * ((blk.C2 - blk.C1) * eps + blk.d2 - blk.d1));
  Vec6 lift = T.transpose() * jump;
  backward_node(params, weights, cache, l, eps + (1.0 - blk.f1) * lift, out);
  backward_node(params, weights, cache, r, eps - blk.f1 * lift, out);
}

}  // namespace

std::vector<LeafIncrement> backward_pass(const NetworkParams& params,
                                         const std::vector<double>& weights,
                                         const ForwardCache& cache,
                                         std::uint64_t expected_stamp,
                                         const Vec6& strain_macro) {
  if (cache.stamp == 0 || cache.stamp != expected_stamp) {
    throw std::logic_error("backward_pass: forward cache is stale");
  }
  std::vector<LeafIncrement> out(params.num_leaves());
  backward_node(params, weights, cache, 0, strain_macro, out);
  return out;
}

namespace {

void divide_node(const NetworkParams& params,
                 const std::vector<double>& weights, int v,
                 const ScaleTensor& A, const Mat3& orient_mother,
                 std::vector<CellGeometry>& out) {
  const Vec3& a = params.angles[v];
  Mat3 orient = orient_mother * euler_rotation(a(0), a(1), a(2)).transpose();
  if (v >= params.num_leaves() - 1) {
    out.push_back({v - (params.num_leaves() - 1), A, orient});
    return;
  }
  int l = 2 * v + 1, r = 2 * v + 2;
  bool la = weights[l] > 0.0, ra = weights[r] > 0.0;
  if (la && ra) {
    double f1 = std::clamp(weights[l] / weights[v], kFractionFloor,
                           1.0 - kFractionFloor);
    Vec3 n = orient * Vec3::UnitZ();
    CellDivisionResult div = divide_cell(A, f1, n);
    divide_node(params, weights, l, div.first, orient, out);
    divide_node(params, weights, r, div.second, orient, out);
  } else if (la) {
    divide_node(params, weights, l, A, orient, out);
  } else if (ra) {
    divide_node(params, weights, r, A, orient, out);
  }
}

}  // namespace

std::vector<CellGeometry> propagate_scales(const NetworkParams& params,
                                           const ScaleTensor& A_macro) {
  std::vector<double> w = node_weights(params);
  std::vector<CellGeometry> out;
  divide_node(params, w, 0, A_macro, Mat3::Identity(), out);
  return out;
}

NetworkParams transfer_2d_to_3d(const PlanarParams& planar) {
  NetworkParams out;
  out.depth = planar.depth;
  out.z = planar.z;
  out.phase = planar.phase;
  if ((int)planar.theta.size() != out.num_nodes() ||
      (int)planar.z.size() != out.num_leaves() ||
      (int)planar.phase.size() != out.num_leaves()) {
    throw std::invalid_argument("planar parameter arrays have wrong sizes");
  }
  out.angles.resize(out.num_nodes());
  for (int v = 0; v < out.num_nodes(); ++v) {
    out.angles[v] = Vec3(planar.theta[v], 0.0, 0.0);
  }
  out.angles[0](1) = std::numbers::pi / 2.0;
  out.validate();
  return out;
}

namespace {

template <typename A, typename B>
double frob_dot(const A& a, const B& b) {
  return (a.array() * b.array()).sum();
}

void grad_node(const NetworkParams& params,
               const std::vector<double>& raw_weights,
               const ForwardCache& cache, int v, const Mat6& adj_mother,
               ParamGradient& grad) {
  const auto& blk = cache.blocks[v];
  if (blk.mode == -1) return;
  const Vec3& a = params.angles[v];
  Mat3 R = euler_rotation(a(0), a(1), a(2));
  auto dR = euler_rotation_derivs(a(0), a(1), a(2));
  Mat6 P = cache.rot[v];
  Mat6 sym_adj = adj_mother + adj_mother.transpose();
  for (int t = 0; t < 3; ++t) {
    Mat6 Pdot = mandel_rotation_deriv(R, dR[t]).transpose();
    grad.angles[v](t) += frob_dot(sym_adj, Pdot * blk.Ch * P.transpose());
  }
  Mat6 adj = P.transpose() * adj_mother * P;
  if (v >= params.num_leaves() - 1) return;
  int l = 2 * v + 1, r = 2 * v + 2;
  if (blk.mode == 1) {
    grad_node(params, raw_weights, cache, l, adj, grad);
    return;
  }
  if (blk.mode == 2) {
    grad_node(params, raw_weights, cache, r, adj, grad);
    return;
  }
  const auto& T = traction_selector();
  double f1 = blk.f1, f2 = 1.0 - f1, ff = f1 * f2;
  Mat6 dC = blk.C1 - blk.C2;
  Eigen::Matrix<double, 3, 6> Y = blk.Minv * (T * dC);
  Mat6 S = T.transpose() * Y;
  Mat3 core = Y * adj * Y.transpose();
  Mat6 lifted_core = T.transpose() * core * T;
  Mat6 cross = adj * S.transpose() + S * adj;
  Mat6 adj1 = f1 * adj - ff * cross + ff * f2 * lifted_core;
  Mat6 adj2 = f2 * adj + ff * cross + ff * f1 * lifted_core;
  double gf1 = frob_dot(adj, dC) - (1.0 - 2.0 * f1) * frob_dot(adj, dC * S) -
               ff * frob_dot(core, T * dC * T.transpose());
  // Chain the block fraction back to the bottom-layer activations.
  int layer = layer_of(v);
  int pos = v - ((1 << (layer - 1)) - 1);
  int span = 1 << (params.depth - layer);
  int first = pos * span;
  double denom = raw_weights[v];
  for (int j = first; j < first + span / 2; ++j) {
    if (params.z[j] > 0.0) grad.z[j] += gf1 * f2 / denom;
  }
  for (int j = first + span / 2; j < first + span; ++j) {
    if (params.z[j] > 0.0) grad.z[j] -= gf1 * f1 / denom;
  }
  grad_node(params, raw_weights, cache, l, adj1, grad);
  grad_node(params, raw_weights, cache, r, adj2, grad);
}

}  // namespace

void accumulate_gradient(const NetworkParams& params,
                         const std::vector<double>& raw_weights,
                         const ForwardCache& cache, const Mat6& top_adjoint,
                         ParamGradient& grad) {
  if (grad.z.size() != (std::size_t)params.num_leaves()) {
    grad.z.assign(params.num_leaves(), 0.0);
    grad.angles.assign(params.num_nodes(), Vec3::Zero());
  }
  grad_node(params, raw_weights, cache, 0, top_adjoint, grad);
}

}  // namespace dmn
