#pragma once

// Mandel-vector kernels shared by all modules. Orthonormal convention:
// shear rows/columns carry a factor sqrt(2), so 6x6 rotations are
// orthogonal and stress power is the plain dot product.

#include <Eigen/Dense>
#include <array>

namespace dmn {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Component ordering: 11, 22, 33, 23, 13, 12 (shears scaled by sqrt(2)).
inline constexpr std::array<std::pair<int, int>, 6> kMandelPairs = {
    {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

inline constexpr double kSqrt2 = 1.4142135623730951;

Vec6 to_mandel(const Mat3& sym);
Mat3 from_mandel(const Vec6& v);

// R = Ry(alpha) * Rx(beta) * Rz(gamma). The first angle tilts the local
// interface normal e3, which is what lets a planar network transfer into
// 3-D with the top-node beta = pi/2 trick.
Mat3 euler_rotation(double alpha, double beta, double gamma);

// d R / d(alpha, beta, gamma)
std::array<Mat3, 3> euler_rotation_derivs(double alpha, double beta,
                                          double gamma);

// 6x6 Mandel rotation of a 3x3 rotation matrix; orthogonal when R is.
Mat6 mandel_rotation(const Mat3& R);

// Directional derivative of mandel_rotation at R along dR.
Mat6 mandel_rotation_deriv(const Mat3& R, const Mat3& dR);

Mat6 rotation6(double alpha, double beta, double gamma);

struct EigSym3 {
  Vec3 values;   // descending
  Mat3 vectors;  // columns are unit eigenvectors, M = Q diag(values) Q^T
};

// Symmetric 3x3 eigendecomposition with deterministic ordering: eigenvalues
// descending, each eigenvector's largest-magnitude component made positive.
// Throws std::invalid_argument when M is not symmetric within tolerance.
EigSym3 eig_sym3(const Mat3& M, double sym_tol = 1e-12);

}  // namespace dmn
