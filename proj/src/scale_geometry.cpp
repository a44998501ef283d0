#include "dmn/scale_geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dmn {

namespace {

void check_spd(const ScaleTensor& A, const EigSym3& eig) {
  if (eig.values(2) <= 0.0 || !A.allFinite()) {
    throw std::invalid_argument("scale tensor must be positive definite");
  }
}

void check_unit(const Vec3& n) {
  if (std::abs(n.norm() - 1.0) > 1e-8) {
    throw std::invalid_argument("normal must be a unit vector");
  }
}

}  // namespace

double transformed_normal_norm(const ScaleTensor& A, const Vec3& n) {
  EigSym3 eig = eig_sym3(A, 1e-9);
  check_spd(A, eig);
  // T = diag(1/sqrt(lambda_i)), so |T R^T n|^2 = sum (R^T n)_i^2 / lambda_i.
  Vec3 local = eig.vectors.transpose() * n;
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += local(i) * local(i) / eig.values(i);
  return std::sqrt(s);
}

double cutting_area(const ScaleTensor& A, const Vec3& n) {
  check_unit(n);
  double det = A.determinant();
  if (det <= 0.0) throw std::invalid_argument("degenerate scale tensor");
  return std::numbers::pi / (std::sqrt(det) * transformed_normal_norm(A, n));
}

double cell_volume(const ScaleTensor& A) {
  double det = A.determinant();
  if (det <= 0.0) throw std::invalid_argument("degenerate scale tensor");
  return 4.0 * std::numbers::pi / (3.0 * std::sqrt(det));
}

double reciprocal_length(const ScaleTensor& A, const Vec3& n_c) {
  check_unit(n_c);
  return 1.0 / (2.0 * transformed_normal_norm(A, n_c));
}

CellDivisionResult divide_cell(const ScaleTensor& A0, double f1,
                               const Vec3& n) {
  if (!(f1 > 0.0 && f1 < 1.0)) {
    throw std::invalid_argument("divide_cell: f1 must lie in (0,1)");
  }
  check_unit(n);
  double norm2 = transformed_normal_norm(A0, n);
  norm2 *= norm2;
  Mat3 outer = (n * n.transpose()) / norm2;
  double f2 = 1.0 - f1;
  CellDivisionResult out;
  out.first = A0 - (1.0 - 1.0 / (f1 * f1)) * outer;
  out.second = A0 - (1.0 - 1.0 / (f2 * f2)) * outer;
  out.cutting_area = cutting_area(A0, n);
  return out;
}

EllipsoidAxes ellipsoid_axes(const ScaleTensor& A) {
  EigSym3 eig = eig_sym3(A, 1e-9);
  check_spd(A, eig);
  EllipsoidAxes out;
  for (int i = 0; i < 3; ++i) {
    // Largest eigenvalue of A is the shortest axis; report descending length.
    out.lengths(i) = 1.0 / std::sqrt(eig.values(2 - i));
    out.axes.col(i) = eig.vectors.col(2 - i);
  }
  return out;
}

}  // namespace dmn
