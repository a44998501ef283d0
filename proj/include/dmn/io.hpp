#pragma once

// Versioned JSON files: network parameters (3-D and planar) and the run
// configuration (phases, macro cell, load path).

#include <stdexcept>
#include <string>

#include "dmn/network.hpp"
#include "dmn/solver.hpp"

namespace dmn {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

NetworkParams load_params(const std::string& path);
void save_params(const NetworkParams& params, const std::string& path);

PlanarParams load_planar_params(const std::string& path);
void save_planar_params(const PlanarParams& params, const std::string& path);

// One load-path segment: a linear ramp split into equal steps. Components
// are tensor values keyed "11","22","33","23","13","12"; strain entries
// prescribe total strain increments over the segment, stress entries give
// stress-increment targets (GPa). Unlisted components default to a zero
// stress-increment target.
struct LoadSegment {
  int steps = 1;
  double duration = 1.0;  // ms
  std::array<bool, 6> strain_control{};
  Vec6 target = Vec6::Zero();  // Mandel increments over the whole segment
};

struct RunConfig {
  std::string params_path;
  std::vector<PhaseSpec> phases;
  ScaleTensor A_macro = Mat3::Identity();
  std::vector<LoadSegment> path;
};

RunConfig load_run_config(const std::string& path);

}  // namespace dmn
