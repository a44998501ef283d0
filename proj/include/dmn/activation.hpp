#pragma once

// Crack-plane initiation: Mohr-circle search for the plane of maximum
// effective traction and the activation rule with its allowances.

#include <vector>

#include "dmn/mandel.hpp"
#include "dmn/scale_geometry.hpp"

namespace dmn {

struct CrackCandidate {
  Vec3 n_c = Vec3::UnitX();  // unit normal, global frame
  double t_m = 0.0;          // effective traction, GPa
  double theta = 0.0;        // Mohr angle from the first principal direction
};

// Analytic maximizer of t_m over all unit normals: candidates at Mohr
// angles {0, +-pi/4, +-theta*} in the plane of the first and third
// principal directions. Returns one candidate, or the +-theta twin pair
// (equal t_m) when the maximum is off-axis.
std::vector<CrackCandidate> critical_planes(const Vec6& stress, double beta);

struct CellCandidateInput {
  Vec6 stress = Vec6::Zero();   // cell stress, global frame, GPa
  double t_c = 0.0;             // critical traction of this cell's phase
  double beta = 1.0;
  double K = 1e8;               // intact layer stiffness, GPa/mm
  std::vector<Vec3> existing;   // normals of the cell's current cracks
  ScaleTensor A;                // cell scale tensor
};

struct ActivationEvent {
  int cell = -1;
  Vec3 n_c = Vec3::UnitX();
  double t_m = 0.0;
  double t_c = 0.0;    // layer strength, perturbed for twin planes
  double v_c = 0.0;    // reciprocal length
  double area = 0.0;   // crack surface S
  Vec3 d_init = Vec3::Zero();  // equilibrium opening, crack frame
};

// Selects the admissible (cell, plane) with the largest t_m - t_c; returns
// no events when every margin is <= 0. Twin +-theta planes activate
// together with strengths perturbed by +-1e-6 relative. Allowances: at
// most 4 cracks per cell and |cos| < sqrt(2)/2 against existing normals.
std::vector<ActivationEvent> try_activate(
    const std::vector<CellCandidateInput>& cells);

}  // namespace dmn
