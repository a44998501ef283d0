#pragma once

// Ellipsoidal cell geometry: the scale tensor A (mm^-2) defines the cell
// x^T A x = 1. Cell division back-propagates macroscale length scales to
// the bottom-layer micro-cells.

#include "dmn/mandel.hpp"

namespace dmn {

using ScaleTensor = Mat3;  // symmetric positive definite, units mm^-2

// Scale tensor of a sphere with diameter h.
inline ScaleTensor sphere_scale_tensor(double h) {
  return (4.0 / (h * h)) * Mat3::Identity();
}

struct CellDivisionResult {
  ScaleTensor first;    // child taking volume fraction f1
  ScaleTensor second;   // child taking 1 - f1
  double cutting_area;  // shared mid-plane section, mm^2
};

// |T R^T n| with (R, T) from the eigendecomposition of A. This is the
// common kernel of the division closed form, the cutting area, and the
// reciprocal length parameter.
double transformed_normal_norm(const ScaleTensor& A, const Vec3& n);

// Area of the centered section of the ellipsoid A with unit normal n.
double cutting_area(const ScaleTensor& A, const Vec3& n);

// V = 4 pi / (3 sqrt(det A))
double cell_volume(const ScaleTensor& A);

// v_c = 2S / (3V) = 1 / (2 |T R^T n|); for A = (4/h^2) I this is 1/h.
double reciprocal_length(const ScaleTensor& A, const Vec3& n_c);

// Split the cell A0 by the plane through its center with unit normal n so
// that the first child takes volume fraction f1. Children are contained in
// the mother and share its cutting area.
CellDivisionResult divide_cell(const ScaleTensor& A0, double f1,
                               const Vec3& n);

// Ellipsoid semi-axes (descending) and their directions; for reporting.
struct EllipsoidAxes {
  Vec3 lengths;  // semi-axis lengths, mm
  Mat3 axes;     // columns are the axis directions
};
EllipsoidAxes ellipsoid_axes(const ScaleTensor& A);

}  // namespace dmn
