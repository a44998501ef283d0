#pragma once

// Implicit material-point driver: fixed-point network solve at fixed crack
// configuration, the crack-activation outer loop, mixed macroscale control,
// adaptive sub-stepping, and energy diagnostics.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "dmn/activation.hpp"
#include "dmn/cohesive.hpp"
#include "dmn/materials.hpp"
#include "dmn/network.hpp"

namespace dmn {

struct PhaseSpec {
  Material material;
  bool breakable = false;
  CohesiveParams cohesive;  // t_c, G_c, beta, tau; K/kappa fixed, K_h per layer
};

struct Crack {
  int cell = -1;                  // index into NetworkState::cells
  Vec3 n_global = Vec3::UnitZ();  // plane normal, global frame
  Vec3 n_material = Vec3::UnitZ();
  double v_c = 0.0;
  double area = 0.0;
  int step_created = -1;
  CohesiveParams params;          // with K_h and (possibly perturbed) t_c
  CohesiveState state;            // committed
  Eigen::Matrix<double, 6, 3> R;  // crack_rotation(n_material)
};

struct MicroCell {
  int leaf = -1;
  double weight = 0.0;            // volume fraction
  int phase = 0;
  ScaleTensor A;
  Mat3 orientation;               // material frame -> global frame
  PlasticState mat_state;         // committed
  Vec6 eps = Vec6::Zero();        // committed total strain, material frame
  Vec6 sigma = Vec6::Zero();      // committed stress, material frame
};

struct NetworkState {
  NetworkParams params;
  std::vector<double> weights;    // normalized node weights
  std::vector<PhaseSpec> phases;
  std::vector<MicroCell> cells;
  std::vector<Crack> cracks;
  Vec6 eps_macro = Vec6::Zero();  // committed, global frame
  Vec6 sig_macro = Vec6::Zero();
  double time = 0.0;
  int step = 0;
  // Warm start for the next solve.
  std::vector<Vec6> prev_leaf_deps;
  std::vector<Vec3> prev_crack_dd;
  double prev_dt = 0.0;
};

NetworkState make_network_state(const NetworkParams& params,
                                const ScaleTensor& A_macro,
                                std::vector<PhaseSpec> phases);

struct MacroBC {
  std::array<bool, 6> strain_control{};  // true: strain increment prescribed
  Vec6 target = Vec6::Zero();  // strain increments / stress-increment targets
  double dt = 1.0;             // ms
};

struct SolverOptions {
  int max_fixed_point_iters = 40;
  double fixed_point_tol = 1e-6;
  int max_bc_iters = 25;
  double bc_tol = 1e-8;  // GPa on stress targets
  int max_refinements = 10;
  // Testing seam: veto convergence of the sub-step covering (t0, t1).
  std::function<bool(double t0, double t1)> substep_veto;
};

struct CellDiagnostic {
  int leaf = -1;
  double weight = 0.0;
  int phase = 0;
  double eps_p_eq = 0.0;
  double released_per_area = 0.0;  // G of the cell's cracks, GPa*mm
  int cracks = 0;
};

struct StepResult {
  bool converged = false;
  Vec6 deps_macro = Vec6::Zero();
  Vec6 dsig_macro = Vec6::Zero();
  Mat6 C_macro = Mat6::Zero();
  int refinements = 0;       // doublings used by the adaptive driver
  int substeps = 1;
  int newton_iters = 0;      // fixed-point iterations, summed
  int activations = 0;
  std::vector<ActivationEvent> events;
  double work_macro = 0.0;   // trapezoid increment, both scales
  double work_micro = 0.0;
};

struct TrialState;  // internal

// Fixed-point solve at fixed crack configuration. Returns nullopt on
// iteration-cap breach. The state is not modified.
struct NewtonResult {
  Vec6 dsig_macro = Vec6::Zero();
  Mat6 C_macro = Mat6::Zero();
  int iters = 0;
  std::vector<Vec6> leaf_deps;       // base-material strain increments,
                                     // material frame (leaf strain minus
                                     // smeared openings)
  std::vector<Vec6> leaf_dsig;
  std::vector<Vec3> crack_dd;        // per crack, crack frame
  std::vector<BaseEvaluation> base;  // per cell
  std::vector<TractionResult> coh;   // per crack
};
std::optional<NewtonResult> newton_solve(const NetworkState& state,
                                         const Vec6& deps_macro, double dt,
                                         const SolverOptions& opt);

// One full load step with mixed control and crack activation; commits the
// state only on convergence.
StepResult solve_step(NetworkState& state, const MacroBC& bc,
                      const SolverOptions& opt);

// Box-style adaptive refinement around solve_step; on exhaustion the state
// is restored to the pre-step snapshot and converged = false.
StepResult solve_step_adaptive(NetworkState& state, const MacroBC& bc,
                               const SolverOptions& opt);

struct Diagnostics {
  double released_energy = 0.0;    // Pi, GPa*mm^3-scaled by area units
  double avg_plastic_strain = 0.0;
  std::vector<CellDiagnostic> cells;
};
Diagnostics diagnostics(const NetworkState& state);

}  // namespace dmn
