#include "dmn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dmn/materials.hpp"

namespace dmn {

Mat6 sample_orthotropic(std::mt19937_64& rng, const OrthotropicRanges& r) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::array<double, 9> c;
    for (int i = 0; i < 9; ++i) {
      double lo = std::log(r.bounds[i].first);
      double hi = std::log(r.bounds[i].second);
      c[i] = std::exp(lo + (hi - lo) * uniform01(rng));
    }
    try {
      return orthotropic_stiffness(c[0], c[1], c[2], c[3], c[4], c[5], c[6],
                                   c[7], c[8]);
    } catch (const std::invalid_argument&) {
      // not admissible, resample
    }
  }
  throw std::runtime_error("could not sample an SPD orthotropic stiffness");
}

std::pair<Mat6, Mat6> sample_phases(std::mt19937_64& rng,
                                    const OrthotropicRanges& r1,
                                    const OrthotropicRanges& r2) {
  Mat6 a = sample_orthotropic(rng, r1);
  Mat6 b = sample_orthotropic(rng, r2);
  return {a, b};
}

Mat6 predict(const NetworkParams& params, const Mat6& C1, const Mat6& C2) {
  std::vector<double> w = node_weights(params);
  std::vector<BlockResponse> leaves(params.num_leaves());
  for (int j = 0; j < params.num_leaves(); ++j) {
    leaves[j].C = params.phase[j] == 0 ? C1 : C2;
  }
  ForwardCache cache;
  return forward_pass(params, w, leaves, cache).C;
}

Oracle make_teacher_oracle(NetworkParams teacher) {
  teacher.validate();
  return [teacher](const Mat6& C1, const Mat6& C2) -> std::optional<Mat6> {
    try {
      return predict(teacher, C1, C2);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
}

Oracle make_laminate_oracle(double f1) {
  return [f1](const Mat6& C1, const Mat6& C2) -> std::optional<Mat6> {
    try {
      return homogenize_block({C1, Vec6::Zero()}, {C2, Vec6::Zero()}, f1).C;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
}

std::vector<TrainingSample> oracle_labels(
    const std::vector<std::pair<Mat6, Mat6>>& phases, const Oracle& oracle,
    int* skipped) {
  std::vector<TrainingSample> out;
  int skip = 0;
  for (const auto& [C1, C2] : phases) {
    std::optional<Mat6> label = oracle(C1, C2);
    if (!label) {
      ++skip;
      continue;
    }
    out.push_back({C1, C2, *label});
  }
  if (skipped) *skipped = skip;
  return out;
}

double cost(const NetworkParams& params,
            const std::vector<TrainingSample>& batch) {
  double J = 0.0;
  for (const auto& s : batch) {
    Mat6 pred = predict(params, s.C1, s.C2);
    J += (s.label - pred).squaredNorm() / s.label.squaredNorm();
  }
  return J / (2.0 * batch.size());
}

ParamGradient gradient(const NetworkParams& params,
                       const std::vector<TrainingSample>& batch) {
  ParamGradient g;
  g.z.assign(params.num_leaves(), 0.0);
  g.angles.assign(params.num_nodes(), Vec3::Zero());
  std::vector<double> w = node_weights(params);
  std::vector<double> raw = node_weights_raw(params);
  ForwardCache cache;
  std::vector<BlockResponse> leaves(params.num_leaves());
  double inv_n = 1.0 / batch.size();
  for (const auto& s : batch) {
    for (int j = 0; j < params.num_leaves(); ++j) {
      leaves[j].C = params.phase[j] == 0 ? s.C1 : s.C2;
      leaves[j].dsig = Vec6::Zero();
    }
    Mat6 pred = forward_pass(params, w, leaves, cache).C;
    Mat6 adj = -inv_n * (s.label - pred) / s.label.squaredNorm();
    accumulate_gradient(params, raw, cache, adj, g);
  }
  return g;
}

NetworkParams random_params(int depth, std::mt19937_64& rng) {
  NetworkParams p;
  p.depth = depth;
  p.z.resize(p.num_leaves());
  p.angles.resize(p.num_nodes());
  p.phase.resize(p.num_leaves());
  for (auto& a : p.angles) {
    for (int t = 0; t < 3; ++t) {
      a(t) = std::numbers::pi * (2.0 * uniform01(rng) - 1.0);
    }
  }
  for (int j = 0; j < p.num_leaves(); ++j) {
    double u = uniform01(rng);
    p.z[j] = u > 0.0 ? u : 1.0;  // U(0,1]
    p.phase[j] = j % 2;          // alternate phases across the bottom layer
  }
  return p;
}

NetworkParams compress(const NetworkParams& params, double threshold) {
  NetworkParams out = params;
  std::vector<double> w = node_weights(params);
  for (int j = 0; j < params.num_leaves(); ++j) {
    if (w[params.leaf_id(j)] < threshold || params.z[j] <= 0.0) {
      out.z[j] = 0.0;
    }
  }
  if (node_weights_raw(out)[0] <= 0.0) {
    throw std::runtime_error("compression would remove every leaf");
  }
  return out;
}

namespace {

int active_nodes(const NetworkParams& params) {
  std::vector<double> raw = node_weights_raw(params);
  int n = 0;
  for (double x : raw) {
    if (x > 0.0) ++n;
  }
  return n;
}

}  // namespace

TrainResult train(const TrainingConfig& config,
                  const std::vector<TrainingSample>& train_set,
                  const std::vector<TrainingSample>& test_set,
                  const NetworkParams& init) {
  if (train_set.empty()) throw std::invalid_argument("empty training set");
  TrainResult res;
  res.params = init;
  res.params.validate();
  std::mt19937_64 rng(config.seed);
  double lr = config.learning_rate;
  double prev_J = cost(res.params, train_set);
  int rising = 0;
  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.decay_every > 0 && epoch > 1 &&
        (epoch - 1) % config.decay_every == 0) {
      lr *= config.decay_factor;
    }
    // Deterministic Fisher-Yates shuffle on our own uniform stream.
    for (int i = (int)order.size() - 1; i > 0; --i) {
      int k = (int)(uniform01(rng) * (i + 1));
      if (k > i) k = i;
      std::swap(order[i], order[k]);
    }
    int bs = std::max(1, config.batch_size);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      std::vector<TrainingSample> batch;
      for (std::size_t k = start; k < order.size() && k < start + bs; ++k) {
        batch.push_back(train_set[order[k]]);
      }
      ParamGradient g = gradient(res.params, batch);
      for (int j = 0; j < res.params.num_leaves(); ++j) {
        res.params.z[j] -= lr * g.z[j];
      }
      for (int v = 0; v < res.params.num_nodes(); ++v) {
        res.params.angles[v] -= lr * g.angles[v];
      }
      // Keep at least one live leaf.
      double zmax = *std::max_element(res.params.z.begin(),
                                      res.params.z.end());
      if (zmax <= 0.0) res.params.z[0] = 1e-6;
    }
    EpochRow row;
    row.epoch = epoch;
    row.train_J = cost(res.params, train_set);
    row.test_J = test_set.empty() ? 0.0 : cost(res.params, test_set);
    row.active_nodes = active_nodes(res.params);
    row.lr = lr;
    res.report.push_back(row);
    if (row.train_J > prev_J) {
      if (++rising >= config.divergence_patience) {
        std::ostringstream msg;
        msg << "training diverged: cost rose for " << rising
            << " consecutive epochs (epoch " << epoch << ", J " << row.train_J
            << " from " << prev_J << "); reduce the learning rate";
        throw std::runtime_error(msg.str());
      }
    } else {
      rising = 0;
    }
    prev_J = row.train_J;
  }
  if (config.compress_threshold > 0.0) {
    res.params = compress(res.params, config.compress_threshold);
  }
  res.final_train_J = cost(res.params, train_set);
  res.final_test_J = test_set.empty() ? 0.0 : cost(res.params, test_set);
  return res;
}

}  // namespace dmn
