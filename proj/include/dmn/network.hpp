#pragma once

// Binary-tree material network: node weights from bottom-layer activations,
// analytical two-layer laminate homogenization, forward propagation of
// stiffness and residual stress, backward propagation of stress/strain, and
// the planar-to-3D parameter transfer.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dmn/mandel.hpp"
#include "dmn/scale_geometry.hpp"

namespace dmn {

struct SingularInterfaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Trainable parameters of a depth-N network. Nodes live in a flat heap:
// id 0 is the top node, children of id v are 2v+1 and 2v+2. Layer i
// (1-based) spans ids [2^(i-1)-1, 2^i-2]; bottom-layer node j has id
// 2^(N-1)-1+j.
struct NetworkParams {
  int depth = 1;
  std::vector<double> z;        // activations, one per bottom node
  std::vector<Vec3> angles;     // (alpha, beta, gamma) per node, heap order
  std::vector<int> phase;       // phase id per bottom node

  int num_leaves() const { return 1 << (depth - 1); }
  int num_nodes() const { return (1 << depth) - 1; }
  int leaf_id(int j) const { return num_leaves() - 1 + j; }
  void validate() const;
};

// Parameters of a planar (2-D) network: one in-plane angle per node.
struct PlanarParams {
  int depth = 1;
  std::vector<double> z;
  std::vector<double> theta;  // per node, heap order
  std::vector<int> phase;
};

// ReLU leaf weights propagated up the tree, normalized so the top node has
// weight 1. Throws when every activation is non-positive.
std::vector<double> node_weights(const NetworkParams& params);

// Same, without the normalization (used by the gradient chain).
std::vector<double> node_weights_raw(const NetworkParams& params);

struct BlockResponse {
  Mat6 C = Mat6::Zero();
  Vec6 dsig = Vec6::Zero();
};

// Analytical two-phase laminate in the block-local frame (interface normal
// e3): in-plane strain components (11, 22, 12) are continuous, traction
// components (33, 23, 13) are in equilibrium, and volume averages with
// weights (f1, 1-f1) recover the block response.
BlockResponse homogenize_block(const BlockResponse& r1,
                               const BlockResponse& r2, double f1);

// Forward/backward caches; invalidated whenever leaf responses change.
struct ForwardCache {
  struct Block {
    Mat6 C1, C2;           // child responses rotated into the block frame
    Vec6 d1, d2;
    Mat3 Minv;
    Mat6 Ch;               // homogenized response before the node rotation
    Vec6 dh;
    double f1 = 0.5;
    int mode = -1;         // 0 laminate, 1 first child only, 2 second only
  };
  std::vector<Block> blocks;      // per node id (leaf entries hold Ch only)
  std::vector<Mat6> rot;          // per node id: local -> mother, Mandel
  std::vector<BlockResponse> leaf_resp;  // material-frame leaf inputs
  std::uint64_t stamp = 0;
  std::size_t laminate_ops = 0;   // active two-child homogenizations
};

// Propagate leaf responses (given in each bottom node's material frame) to
// the top node; the result is expressed in the global frame.
BlockResponse forward_pass(const NetworkParams& params,
                           const std::vector<double>& weights,
                           const std::vector<BlockResponse>& leaf_responses,
                           ForwardCache& cache);

struct LeafIncrement {
  Vec6 strain = Vec6::Zero();
  Vec6 stress = Vec6::Zero();
};

// De-homogenize the macroscale increments down to every active bottom node,
// consistent with the interface conditions of each block. Requires the
// cache produced by forward_pass for the same leaf state (stamp-checked).
std::vector<LeafIncrement> backward_pass(const NetworkParams& params,
                                         const std::vector<double>& weights,
                                         const ForwardCache& cache,
                                         std::uint64_t expected_stamp,
                                         const Vec6& strain_macro);

// Scale tensors and orientations of the active bottom cells (Box-style
// backward cell division from the macro cell).
struct CellGeometry {
  int leaf = -1;              // bottom-node index
  ScaleTensor A;              // global frame
  Mat3 orientation;           // material frame -> global frame
};
std::vector<CellGeometry> propagate_scales(const NetworkParams& params,
                                           const ScaleTensor& A_macro);

// Planar network lifted to 3-D: activations unchanged, in-plane angles map
// to alpha with beta = gamma = 0, and the top node gets beta = pi/2 so the
// stacking axis becomes global axis 3.
NetworkParams transfer_2d_to_3d(const PlanarParams& planar);

// --- gradients (used by training) -------------------------------------

struct ParamGradient {
  std::vector<double> z;
  std::vector<Vec3> angles;
};

// Reverse-mode accumulation of d<cost>/d(params) given the adjoint of the
// top-node stiffness. Leaf responses must be pure stiffness (zero residual).
void accumulate_gradient(const NetworkParams& params,
                         const std::vector<double>& raw_weights,
                         const ForwardCache& cache, const Mat6& top_adjoint,
                         ParamGradient& grad);

}  // namespace dmn
