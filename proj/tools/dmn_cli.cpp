// Material-network driver: train parameters, run load paths on a single
// material point, lift planar parameters to 3-D, and report cell divisions.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "dmn/io.hpp"
#include "dmn/solver.hpp"
#include "dmn/training.hpp"

namespace fs = std::filesystem;
using namespace dmn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 2;
constexpr int kExitConfig = 3;

bool log_enabled() {
  const char* v = std::getenv("DMN_LOG");
  return v && std::string(v) == "debug";
}

std::string g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Tensor components from a Mandel vector (shears de-scaled).
std::string mandel_row(const Vec6& v) {
  std::ostringstream os;
  for (int m = 0; m < 6; ++m) {
    os << ',' << g17(m < 3 ? v(m) : v(m) / kSqrt2);
  }
  return os.str();
}

int run_point(const RunConfig& cfg, const NetworkParams& params,
              const fs::path& out_dir) {
  fs::create_directories(out_dir);
  NetworkState state = make_network_state(params, cfg.A_macro, cfg.phases);
  SolverOptions opt;

  std::ofstream csv(out_dir / "stress_strain.csv");
  std::ofstream events(out_dir / "crack_events.csv");
  csv << "step,time,eps11,eps22,eps33,eps23,eps13,eps12,"
         "sig11,sig22,sig33,sig23,sig13,sig12,Pi,avg_eps_p,cracks\n";
  events << "step,time,cell,leaf,nx,ny,nz,t_m,v_c,S\n";

  auto write_row = [&]() {
    Diagnostics d = diagnostics(state);
    csv << state.step << ',' << g17(state.time) << mandel_row(state.eps_macro)
        << mandel_row(state.sig_macro) << ',' << g17(d.released_energy) << ','
        << g17(d.avg_plastic_strain) << ',' << state.cracks.size() << "\n";
  };
  write_row();

  bool ok = true;
  for (const auto& seg : cfg.path) {
    for (int i = 0; i < seg.steps && ok; ++i) {
      MacroBC bc;
      bc.strain_control = seg.strain_control;
      bc.target = seg.target / seg.steps;
      bc.dt = seg.duration / seg.steps;
      StepResult res = solve_step_adaptive(state, bc, opt);
      if (!res.converged) {
        std::cerr << "step " << state.step + 1
                  << ": no convergence after refinement\n";
        ok = false;
        break;
      }
      for (const auto& ev : res.events) {
        events << state.step << ',' << g17(state.time) << ',' << ev.cell << ','
               << state.cells[ev.cell].leaf << ',' << g17(ev.n_c(0)) << ','
               << g17(ev.n_c(1)) << ',' << g17(ev.n_c(2)) << ','
               << g17(ev.t_m) << ',' << g17(ev.v_c) << ',' << g17(ev.area)
               << "\n";
      }
      write_row();
      if (log_enabled()) {
        std::cerr << "step " << state.step << " substeps " << res.substeps
                  << " iters " << res.newton_iters << " cracks "
                  << state.cracks.size() << "\n";
      }
    }
    if (!ok) break;
  }

  // Per-cell summary, one row per micro-cell (treemap input).
  std::ofstream cells(out_dir / "cells.csv");
  cells << "leaf,weight,phase,eps_p,G,cracks\n";
  Diagnostics d = diagnostics(state);
  for (const auto& c : d.cells) {
    cells << c.leaf << ',' << g17(c.weight) << ',' << c.phase << ','
          << g17(c.eps_p_eq) << ',' << g17(c.released_per_area) << ','
          << c.cracks << "\n";
  }
  return ok ? kExitOk : kExitNoConvergence;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::string& sweep) {
  RunConfig cfg = load_run_config(config_path);
  NetworkParams params = load_params(cfg.params_path);
  if (sweep.empty()) {
    return run_point(cfg, params, out_dir);
  }
  auto eq = sweep.find('=');
  if (eq == std::string::npos || sweep.substr(0, eq) != "h") {
    throw ConfigError("--sweep supports only h=v1,v2,...");
  }
  std::vector<double> values;
  std::stringstream ss(sweep.substr(eq + 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) values.push_back(std::stod(tok));
  if (values.empty()) throw ConfigError("--sweep needs at least one value");

  std::vector<int> codes(values.size(), 0);
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < values.size(); ++i) {
    workers.emplace_back([&, i]() {
      RunConfig point = cfg;
      point.A_macro = sphere_scale_tensor(values[i]);
      fs::path dir = fs::path(out_dir) / ("h_" + std::to_string(values[i]));
      codes[i] = run_point(point, params, dir);
    });
  }
  for (auto& w : workers) w.join();
  for (int c : codes) {
    if (c != kExitOk) return kExitNoConvergence;
  }
  return kExitOk;
}

int cmd_train(int depth, int n_train, int n_test, std::uint64_t seed,
              const std::string& oracle_spec, TrainingConfig tc,
              const std::string& out_params, const std::string& out_report) {
  Oracle oracle;
  if (oracle_spec.rfind("teacher:", 0) == 0) {
    oracle = make_teacher_oracle(load_params(oracle_spec.substr(8)));
  } else if (oracle_spec.rfind("laminate:", 0) == 0) {
    oracle = make_laminate_oracle(std::stod(oracle_spec.substr(9)));
  } else {
    throw ConfigError("--oracle must be teacher:<file> or laminate:<f1>");
  }
  tc.seed = seed;
  std::mt19937_64 rng(seed);
  OrthotropicRanges ranges;
  std::vector<std::pair<Mat6, Mat6>> phase_pairs;
  for (int i = 0; i < n_train + n_test; ++i) {
    phase_pairs.push_back(sample_phases(rng, ranges, ranges));
  }
  int skipped = 0;
  std::vector<TrainingSample> all = oracle_labels(phase_pairs, oracle, &skipped);
  if (skipped > 0) {
    std::cerr << "skipped " << skipped << " samples (oracle failure)\n";
  }
  if ((int)all.size() <= n_test) throw ConfigError("not enough samples");
  std::vector<TrainingSample> test(all.end() - n_test, all.end());
  all.resize(all.size() - n_test);

  NetworkParams init = random_params(depth, rng);
  TrainResult res = train(tc, all, test, init);
  save_params(res.params, out_params);
  std::ofstream rep(out_report);
  rep << "epoch,train_J,test_J,active_nodes,lr\n";
  for (const auto& row : res.report) {
    rep << row.epoch << ',' << g17(row.train_J) << ',' << g17(row.test_J)
        << ',' << row.active_nodes << ',' << g17(row.lr) << "\n";
  }
  std::cout << "final train J " << g17(res.final_train_J) << ", test J "
            << g17(res.final_test_J) << "\n";
  return kExitOk;
}

int cmd_divide(const std::string& params_path, double h,
               const std::string& out_path) {
  NetworkParams params = load_params(params_path);
  std::vector<CellGeometry> cells =
      propagate_scales(params, sphere_scale_tensor(h));
  std::ofstream out(out_path);
  out << "leaf,volume,len1,len2,len3,"
         "ax1x,ax1y,ax1z,ax2x,ax2y,ax2z,ax3x,ax3y,ax3z\n";
  for (const auto& c : cells) {
    EllipsoidAxes ax = ellipsoid_axes(c.A);
    out << c.leaf << ',' << g17(cell_volume(c.A));
    for (int i = 0; i < 3; ++i) out << ',' << g17(ax.lengths(i));
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) out << ',' << g17(ax.axes(k, i));
    }
    out << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binary-tree material network driver"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", sweep;
  auto* run = app.add_subcommand("run", "run a load path");
  run->add_option("--config", config_path, "run configuration (JSON)")
      ->required();
  run->add_option("--out-dir", out_dir, "output directory");
  run->add_option("--sweep", sweep, "sweep, e.g. h=0.3,1,3");

  int depth = 4, n_train = 400, n_test = 100;
  std::uint64_t seed = 0;
  std::string oracle_spec, out_params = "params.json",
              out_report = "report.csv";
  TrainingConfig tc;
  auto* tr = app.add_subcommand("train", "train network parameters");
  tr->add_option("--depth", depth, "network depth");
  tr->add_option("--samples", n_train, "training samples");
  tr->add_option("--test-samples", n_test, "test samples");
  tr->add_option("--seed", seed, "random seed");
  tr->add_option("--oracle", oracle_spec, "teacher:<file> or laminate:<f1>")
      ->required();
  tr->add_option("--epochs", tc.epochs, "epochs");
  tr->add_option("--batch", tc.batch_size, "batch size");
  tr->add_option("--lr", tc.learning_rate, "learning rate");
  tr->add_option("--decay-every", tc.decay_every, "epochs between decays");
  tr->add_option("--compress", tc.compress_threshold,
                 "leaf-weight pruning threshold");
  tr->add_option("--out", out_params, "output parameter file");
  tr->add_option("--report", out_report, "training report CSV");

  std::string in_path, out_path;
  auto* tf = app.add_subcommand("transfer", "lift planar parameters to 3-D");
  tf->add_option("--in", in_path, "planar parameter file")->required();
  tf->add_option("--out", out_path, "3-D parameter file")->required();

  std::string div_params;
  double div_h = 1.0;
  std::string div_out = "cells_report.csv";
  auto* dv = app.add_subcommand("divide", "report the cell division");
  dv->add_option("--params", div_params, "parameter file")->required();
  dv->add_option("--size", div_h, "macro sphere diameter (mm)");
  dv->add_option("--out", div_out, "report CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, sweep);
    if (tr->parsed()) {
      return cmd_train(depth, n_train, n_test, seed, oracle_spec, tc,
                       out_params, out_report);
    }
    if (tf->parsed()) {
      NetworkParams p3 = transfer_2d_to_3d(load_planar_params(in_path));
      save_params(p3, out_path);
      return kExitOk;
    }
    if (dv->parsed()) return cmd_divide(div_params, div_h, div_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  }
  return kExitConfig;
}
