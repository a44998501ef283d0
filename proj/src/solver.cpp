#include "dmn/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dmn {

NetworkState make_network_state(const NetworkParams& params,
                                const ScaleTensor& A_macro,
                                std::vector<PhaseSpec> phases) {
  NetworkState st;
  st.params = params;
  st.params.validate();
  st.weights = node_weights(params);
  st.phases = std::move(phases);
  for (int j = 0; j < params.num_leaves(); ++j) {
    if (params.phase[j] < 0 || params.phase[j] >= (int)st.phases.size()) {
      throw std::invalid_argument("leaf phase id out of range");
    }
  }
  std::vector<CellGeometry> geo = propagate_scales(params, A_macro);
  for (const auto& g : geo) {
    MicroCell c;
    c.leaf = g.leaf;
    c.weight = st.weights[params.leaf_id(g.leaf)];
    c.phase = params.phase[g.leaf];
    c.A = g.A;
    c.orientation = g.orientation;
    st.cells.push_back(c);
  }
  return st;
}

struct TrialState {};

std::optional<NewtonResult> newton_solve(const NetworkState& state,
                                         const Vec6& deps_macro, double dt,
                                         const SolverOptions& opt) {
  const int ncell = (int)state.cells.size();
  const int ncrack = (int)state.cracks.size();

  std::vector<Vec6> deps(ncell);
  std::vector<Vec3> dd(ncrack, Vec3::Zero());
  bool warm = (int)state.prev_leaf_deps.size() == ncell && state.prev_dt > 0.0;
  double ratio = warm ? dt / state.prev_dt : 0.0;
  for (int j = 0; j < ncell; ++j) {
    if (warm) {
      deps[j] = ratio * state.prev_leaf_deps[j];
    } else {
      deps[j] = mandel_rotation(state.cells[j].orientation).transpose() *
                deps_macro;
    }
  }
  for (int c = 0; c < ncrack && c < (int)state.prev_crack_dd.size(); ++c) {
    if (warm) dd[c] = ratio * state.prev_crack_dd[c];
  }

  NewtonResult res;
  res.base.resize(ncell);
  res.coh.resize(ncrack);
  std::vector<BlockResponse> leaf_resp(state.params.num_leaves());
  ForwardCache cache;
  std::vector<Vec6> new_deps(ncell);
  std::vector<Vec6> new_dsig(ncell);
  std::vector<Vec3> new_dd(ncrack);

  auto evaluate = [&]() {
    for (int j = 0; j < ncell; ++j) {
      const MicroCell& cell = state.cells[j];
      res.base[j] = evaluate_base(state.phases[cell.phase].material,
                                  cell.mat_state, cell.eps, deps[j]);
    }
    for (int c = 0; c < ncrack; ++c) {
      res.coh[c] =
          evaluate_cohesive(state.cracks[c].params, state.cracks[c].state,
                            dd[c], dt);
    }
    for (int j = 0; j < ncell; ++j) {
      std::vector<CrackContribution> contribs;
      for (int c = 0; c < ncrack; ++c) {
        if (state.cracks[c].cell != j) continue;
        contribs.push_back({state.cracks[c].v_c, state.cracks[c].R,
                            res.coh[c].G, res.coh[c].dd_res});
      }
      EnrichedResponse enr = enrich_cell_response(
          res.base[j].D, res.base[j].deps_res, contribs);
      leaf_resp[state.cells[j].leaf] = {enr.C, enr.dsig};
    }
  };

  for (int it = 1; it <= opt.max_fixed_point_iters; ++it) {
    evaluate();
    BlockResponse top =
        forward_pass(state.params, state.weights, leaf_resp, cache);
    std::vector<LeafIncrement> inc = backward_pass(
        state.params, state.weights, cache, cache.stamp, deps_macro);
    for (int j = 0; j < ncell; ++j) {
      new_deps[j] = inc[state.cells[j].leaf].strain;
      new_dsig[j] = inc[state.cells[j].leaf].stress;
    }
    for (int c = 0; c < ncrack; ++c) {
      const Vec6& dsig_cell = new_dsig[state.cracks[c].cell];
      new_dd[c] = res.coh[c].G * (state.cracks[c].R.transpose() * dsig_cell) +
                  res.coh[c].dd_res;
    }
    // The leaf strain contains the smeared openings; the base material is
    // driven by the remainder.
    for (int c = 0; c < ncrack; ++c) {
      new_deps[state.cracks[c].cell] -=
          state.cracks[c].v_c * (state.cracks[c].R * new_dd[c]);
    }
    // Relative change per vector, with the denominator floored at a fraction
    // of the largest increment of the same kind. A cell that carries almost
    // none of the macroscale increment (for example behind a fully softened
    // crack) would otherwise pin the loop on its own round-off noise.
    double ref_eps = deps_macro.norm();
    for (int j = 0; j < ncell; ++j) {
      ref_eps = std::max(ref_eps, new_deps[j].norm());
    }
    double ref_dd = 0.0;
    for (int c = 0; c < ncrack; ++c) {
      ref_dd = std::max(ref_dd, new_dd[c].norm());
    }
    // Absolute changes below round-off relevance must not block convergence.
    // Strain lives at O(1e-3), so 1e-12 is noise; openings are amplified by
    // the contact stiffness K ~ 1e8 GPa/mm, so their floor sits much lower.
    const double kNegligibleStrain = 1e-12;
    const double kNegligibleOpening = 1e-16;
    double change = 0.0;
    for (int j = 0; j < ncell; ++j) {
      double abs_ch = (new_deps[j] - deps[j]).norm();
      if (abs_ch < kNegligibleStrain) continue;
      double denom = std::max({new_deps[j].norm(), 1e-3 * ref_eps, 1e-14});
      change = std::max(change, abs_ch / denom);
    }
    for (int c = 0; c < ncrack; ++c) {
      double abs_ch = (new_dd[c] - dd[c]).norm();
      if (abs_ch < kNegligibleOpening) continue;
      double denom = std::max({new_dd[c].norm(), 1e-3 * ref_dd, 1e-14});
      change = std::max(change, abs_ch / denom);
    }
    // Plain Picard can enter a small period-2 cycle once a crack is nearly
    // fully softened (the compliant layer amplifies round-off in the branch
    // selection). Under-relax later iterations to damp it.
    double omega = it <= 8 ? 1.0 : (it <= 24 ? 0.5 : 0.25);
    for (int j = 0; j < ncell; ++j) {
      deps[j] += omega * (new_deps[j] - deps[j]);
    }
    for (int c = 0; c < ncrack; ++c) {
      dd[c] += omega * (new_dd[c] - dd[c]);
    }
    res.iters = it;
    if (change < opt.fixed_point_tol) {
      // Final consistent evaluation at the converged increments.
      evaluate();
      top = forward_pass(state.params, state.weights, leaf_resp, cache);
      res.dsig_macro = top.C * deps_macro + top.dsig;
      res.C_macro = top.C;
      res.leaf_deps = deps;
      res.leaf_dsig.resize(ncell);
      for (int j = 0; j < ncell; ++j) {
        res.leaf_dsig[j] = res.base[j].sigma - state.cells[j].sigma;
      }
      res.crack_dd = dd;
      return res;
    }
  }
  return std::nullopt;
}

namespace {

void append_cracks(NetworkState& state,
                   const std::vector<ActivationEvent>& events, int step) {
  for (const auto& ev : events) {
    const MicroCell& cell = state.cells[ev.cell];
    const PhaseSpec& phase = state.phases[cell.phase];
    Crack cr;
    cr.cell = ev.cell;
    cr.n_global = ev.n_c;
    cr.n_material = cell.orientation.transpose() * ev.n_c;
    cr.v_c = ev.v_c;
    cr.area = ev.area;
    cr.step_created = step;
    cr.params = phase.cohesive;
    cr.params.t_c = ev.t_c;
    cr.params.K_h = phase.material.E_ref * ev.v_c;
    cr.R = crack_rotation(cr.n_material);
    cr.state = make_cohesive_state(cr.params);
    // Equilibrium-preserving insertion at the committed stress.
    Vec3 t_mat = from_mandel(cell.sigma) * cr.n_material;
    cr.state.d = crack_frame(cr.n_material).transpose() * t_mat /
                 cr.params.K;
    cr.state.traction = crack_frame(cr.n_material).transpose() * t_mat;
    state.cracks.push_back(cr);
  }
}

}  // namespace

StepResult solve_step(NetworkState& state, const MacroBC& bc,
                      const SolverOptions& opt) {
  StepResult out;
  out.substeps = 1;
  if (opt.substep_veto && opt.substep_veto(state.time, state.time + bc.dt)) {
    return out;
  }
  std::vector<int> free;
  for (int i = 0; i < 6; ++i) {
    if (!bc.strain_control[i]) free.push_back(i);
  }
  std::size_t cracks_before = state.cracks.size();

  Vec6 deps = Vec6::Zero();
  for (int i = 0; i < 6; ++i) {
    if (bc.strain_control[i]) deps(i) = bc.target(i);
  }
  std::optional<NewtonResult> nr;
  int activation_guard = 4 * (int)state.cells.size() + 8;
  while (true) {
    bool bc_ok = false;
    for (int bc_it = 0; bc_it < opt.max_bc_iters; ++bc_it) {
      nr = newton_solve(state, deps, bc.dt, opt);
      if (!nr) {
        state.cracks.resize(cracks_before);
        return out;
      }
      out.newton_iters += nr->iters;
      if (free.empty()) {
        bc_ok = true;
        break;
      }
      Eigen::VectorXd r(free.size());
      for (std::size_t k = 0; k < free.size(); ++k) {
        r(k) = nr->dsig_macro(free[k]) - bc.target(free[k]);
      }
      if (r.cwiseAbs().maxCoeff() < opt.bc_tol) {
        bc_ok = true;
        break;
      }
      Eigen::MatrixXd Cff(free.size(), free.size());
      for (std::size_t a = 0; a < free.size(); ++a) {
        for (std::size_t b = 0; b < free.size(); ++b) {
          Cff(a, b) = nr->C_macro(free[a], free[b]);
        }
      }
      // Near full failure the tangent can lose rank on the stress-free
      // components; a small Tikhonov shift and a step cap keep the update
      // finite without changing the converged solution (the residual is
      // re-evaluated every iteration).
      double shift = 1e-8 * Cff.norm();
      Cff.diagonal().array() += shift;
      Eigen::VectorXd delta = Cff.partialPivLu().solve(-r);
      double cap = 10.0 * std::max(deps.norm(), 1e-6);
      if (delta.norm() > cap) delta *= cap / delta.norm();
      for (std::size_t k = 0; k < free.size(); ++k) {
        deps(free[k]) += delta(k);
      }
      // Warm-start the next inner solve from the current converged state.
      state.prev_leaf_deps = nr->leaf_deps;
      state.prev_crack_dd = nr->crack_dd;
      state.prev_dt = bc.dt;
    }
    if (!bc_ok) {
      state.cracks.resize(cracks_before);
      return out;
    }

    // Crack activation check at the converged trial configuration.
    std::vector<CellCandidateInput> inputs(state.cells.size());
    for (std::size_t j = 0; j < state.cells.size(); ++j) {
      const MicroCell& cell = state.cells[j];
      const PhaseSpec& phase = state.phases[cell.phase];
      CellCandidateInput& in = inputs[j];
      Mat6 R6 = mandel_rotation(cell.orientation);
      in.stress = R6 * (cell.sigma + nr->leaf_dsig[j]);
      in.beta = phase.cohesive.beta;
      in.K = phase.cohesive.K;
      in.t_c = phase.breakable ? phase.cohesive.t_c
                               : std::numeric_limits<double>::infinity();
      in.A = cell.A;
      for (const auto& cr : state.cracks) {
        if (cr.cell == (int)j) in.existing.push_back(cr.n_global);
      }
    }
    std::vector<ActivationEvent> events = try_activate(inputs);
    if (events.empty() || --activation_guard <= 0) break;
    append_cracks(state, events, state.step + 1);
    out.activations += 1;
    for (const auto& ev : events) out.events.push_back(ev);
    state.prev_leaf_deps = nr->leaf_deps;
    state.prev_crack_dd = nr->crack_dd;
    state.prev_crack_dd.resize(state.cracks.size(), Vec3::Zero());
    state.prev_dt = bc.dt;
  }

  // Commit.
  Vec6 sig_old = state.sig_macro;
  out.converged = true;
  out.deps_macro = deps;
  out.dsig_macro = nr->dsig_macro;
  out.C_macro = nr->C_macro;
  out.work_macro = 0.5 * (2.0 * sig_old + nr->dsig_macro).dot(deps);
  // nr->leaf_deps holds the base-material strain increments (leaf strain
  // minus smeared openings); the cohesive part of the work uses the layer
  // tractions directly.
  double micro = 0.0;
  for (std::size_t c = 0; c < state.cracks.size(); ++c) {
    Crack& cr = state.cracks[c];
    const MicroCell& cell = state.cells[cr.cell];
    micro += cell.weight * cr.v_c *
             0.5 *
             (cr.state.traction + nr->coh[c].traction).dot(nr->crack_dd[c]);
    cr.state = nr->coh[c].state;
  }
  for (std::size_t j = 0; j < state.cells.size(); ++j) {
    MicroCell& cell = state.cells[j];
    micro += cell.weight *
             0.5 * (2.0 * cell.sigma + nr->leaf_dsig[j]).dot(nr->leaf_deps[j]);
    cell.eps += nr->leaf_deps[j];
    cell.sigma = nr->base[j].sigma;
    cell.mat_state = nr->base[j].state;
  }
  out.work_micro = micro;
  state.eps_macro += deps;
  state.sig_macro += nr->dsig_macro;
  state.time += bc.dt;
  state.step += 1;
  state.prev_leaf_deps = nr->leaf_deps;
  state.prev_crack_dd = nr->crack_dd;
  state.prev_dt = bc.dt;
  return out;
}

StepResult solve_step_adaptive(NetworkState& state, const MacroBC& bc,
                               const SolverOptions& opt) {
  NetworkState snapshot = state;
  StepResult agg;
  int n_sub = 1;
  int i_sub = 1;
  int doublings = 0;
  while (true) {
    MacroBC sub = bc;
    sub.target = bc.target / n_sub;
    sub.dt = bc.dt / n_sub;
    StepResult res = solve_step(state, sub, opt);
    agg.newton_iters += res.newton_iters;
    if (res.converged) {
      agg.deps_macro += res.deps_macro;
      agg.dsig_macro += res.dsig_macro;
      agg.C_macro = res.C_macro;
      agg.work_macro += res.work_macro;
      agg.work_micro += res.work_micro;
      agg.activations += res.activations;
      for (const auto& ev : res.events) agg.events.push_back(ev);
      if (i_sub == n_sub) {
        agg.converged = true;
        agg.substeps = n_sub;
        agg.refinements = doublings;
        return agg;
      }
      i_sub += 1;
    } else {
      doublings += 1;
      if (doublings > opt.max_refinements) {
        state = snapshot;
        agg.converged = false;
        agg.substeps = n_sub;
        agg.refinements = opt.max_refinements;
        return agg;
      }
      n_sub *= 2;
      i_sub = 2 * i_sub - 1;
    }
  }
}

Diagnostics diagnostics(const NetworkState& state) {
  Diagnostics out;
  out.cells.resize(state.cells.size());
  std::vector<double> released(state.cells.size(), 0.0);
  std::vector<double> area(state.cells.size(), 0.0);
  std::vector<int> count(state.cells.size(), 0);
  for (const auto& cr : state.cracks) {
    double phi = cohesive_energy(cr.params, cr.state);
    out.released_energy += phi * cr.area;
    released[cr.cell] += phi * cr.area;
    area[cr.cell] += cr.area;
    count[cr.cell] += 1;
  }
  for (std::size_t j = 0; j < state.cells.size(); ++j) {
    const MicroCell& cell = state.cells[j];
    CellDiagnostic& d = out.cells[j];
    d.leaf = cell.leaf;
    d.weight = cell.weight;
    d.phase = cell.phase;
    d.eps_p_eq = cell.mat_state.eps_p_eq;
    d.cracks = count[j];
    d.released_per_area = area[j] > 0.0 ? released[j] / area[j] : 0.0;
    out.avg_plastic_strain += cell.weight * cell.mat_state.eps_p_eq;
  }
  return out;
}

}  // namespace dmn
