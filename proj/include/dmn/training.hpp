#pragma once

// Offline training: orthotropic sample generation, oracle labeling,
// MSE cost with analytic gradients, SGD with step decay, and tree
// compression.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dmn/network.hpp"

namespace dmn {

// Platform-independent U(0,1) draw (53-bit mantissa) so that fixed seeds
// give byte-identical streams everywhere.
inline double uniform01(std::mt19937_64& rng) {
  return (rng() >> 11) * 0x1.0p-53;
}

// Log-uniform bounds on the engineering constants, in the order
// E1, E2, E3, G23, G13, G12, nu21, nu31, nu32.
struct OrthotropicRanges {
  std::array<std::pair<double, double>, 9> bounds = {{{0.1, 100.0},
                                                      {0.1, 100.0},
                                                      {0.1, 100.0},
                                                      {0.05, 50.0},
                                                      {0.05, 50.0},
                                                      {0.05, 50.0},
                                                      {0.05, 0.45},
                                                      {0.05, 0.45},
                                                      {0.05, 0.45}}};
};

// SPD-screened draw; inadmissible constant sets are resampled.
Mat6 sample_orthotropic(std::mt19937_64& rng, const OrthotropicRanges& r);
std::pair<Mat6, Mat6> sample_phases(std::mt19937_64& rng,
                                    const OrthotropicRanges& r1,
                                    const OrthotropicRanges& r2);

struct TrainingSample {
  Mat6 C1, C2;    // phase stiffnesses, material frame
  Mat6 label;     // homogenized stiffness
};

using Oracle = std::function<std::optional<Mat6>(const Mat6&, const Mat6&)>;

// Teacher network: leaves with phase 0 take C1, phase 1 take C2.
Oracle make_teacher_oracle(NetworkParams teacher);
// Single laminate with interface normal e3 and first-phase fraction f1.
Oracle make_laminate_oracle(double f1);

// Labels each phase pair; oracle failures are skipped and counted.
std::vector<TrainingSample> oracle_labels(
    const std::vector<std::pair<Mat6, Mat6>>& phases, const Oracle& oracle,
    int* skipped = nullptr);

Mat6 predict(const NetworkParams& params, const Mat6& C1, const Mat6& C2);

// J = (1/2N) sum ||label - prediction||_F^2 / ||label||_F^2
double cost(const NetworkParams& params,
            const std::vector<TrainingSample>& batch);
ParamGradient gradient(const NetworkParams& params,
                       const std::vector<TrainingSample>& batch);

struct TrainingConfig {
  int epochs = 200;
  int batch_size = 20;
  double learning_rate = 0.05;
  int decay_every = 50;       // epochs between step decays
  double decay_factor = 0.5;
  double compress_threshold = 0.0;  // on normalized leaf weight
  int divergence_patience = 10;
  std::uint64_t seed = 0;
};

NetworkParams random_params(int depth, std::mt19937_64& rng);

struct EpochRow {
  int epoch = 0;
  double train_J = 0.0;
  double test_J = 0.0;
  int active_nodes = 0;
  double lr = 0.0;
};

struct TrainResult {
  NetworkParams params;
  std::vector<EpochRow> report;
  double final_train_J = 0.0;
  double final_test_J = 0.0;
};

// SGD over the training set; throws std::runtime_error when the training
// cost rises for `divergence_patience` consecutive epochs.
TrainResult train(const TrainingConfig& config,
                  const std::vector<TrainingSample>& train_set,
                  const std::vector<TrainingSample>& test_set,
                  const NetworkParams& init);

// Prunes leaves whose normalized weight is below the threshold; chains with
// a single live child are skipped during evaluation, so no reindexing.
NetworkParams compress(const NetworkParams& params, double threshold);

}  // namespace dmn
