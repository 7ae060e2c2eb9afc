#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lhnn/loss.hpp"
#include "lhnn/rng.hpp"

namespace lhnn {

// Optimization settings. Defaults mirror the benchmark configurations: Adam
// with the standard moment constants, minibatches of 512 drawn without
// replacement per epoch and reshuffled every epoch (full batch when the set
// is smaller), Glorot-uniform initialization, all seeded.
struct TrainConfig {
  std::uint64_t steps = 20000;
  double learning_rate = 5e-4;
  Eigen::Index batch_size = 512;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const {
    if (steps < 1) throw ConfigError("TrainConfig: steps must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("TrainConfig: learning rate must be > 0");
    if (batch_size < 1) throw ConfigError("TrainConfig: batch size must be >= 1");
  }
};

struct TrainResult {
  NetworkParams params;
  std::vector<std::pair<std::uint64_t, double>> curve;  // (step, minibatch loss)
  double initial_loss = 0.0;  // full-set loss before the first update
  double final_loss = 0.0;    // full-set loss after the last update
};

// Trains a network on Hamilton's-equations data. Deterministic given the
// seed: initialization, shuffling, and batch composition all come from one
// engine. Throws TrainingError with the step index if the loss leaves the
// finite range, and if training failed to reduce the full-set loss.
inline TrainResult train(const TrainingSet& data, const TrainConfig& cfg,
                         const Architecture& arch) {
  cfg.validate();
  validate_training_set(data);
  arch.validate();
  if (data.inputs.cols() != arch.input_dim)
    throw ConfigError("train: architecture input " + std::to_string(arch.input_dim) +
                      " does not match data row length " + std::to_string(data.inputs.cols()));

  RandomEngine rng(cfg.seed);
  TrainResult result;
  result.params = glorot_init(arch, rng);
  result.initial_loss = hnn_loss(result.params, data);

  const Eigen::Index M = data.inputs.rows();
  const bool full_batch = cfg.batch_size >= M;
  const Eigen::Index B = full_batch ? M : cfg.batch_size;
  std::vector<Eigen::Index> perm = detail::all_rows(data);
  std::size_t cursor = perm.size();  // forces a shuffle before the first minibatch

  ParamGradient m1 = zero_like(result.params);
  ParamGradient m2 = zero_like(result.params);
  std::vector<Eigen::Index> batch(static_cast<std::size_t>(B));
  result.curve.reserve(cfg.steps);

  for (std::uint64_t step = 1; step <= cfg.steps; ++step) {
    if (full_batch) {
      batch = perm;
    } else {
      // Epoch boundary: reshuffle and drop any remainder shorter than a batch.
      if (cursor + static_cast<std::size_t>(B) > perm.size()) {
        rng.shuffle(perm);
        cursor = 0;
      }
      for (Eigen::Index j = 0; j < B; ++j) batch[static_cast<std::size_t>(j)] = perm[cursor + static_cast<std::size_t>(j)];
      cursor += static_cast<std::size_t>(B);
    }

    auto [loss, grad] = loss_and_parameter_gradient(result.params, data, batch);
    if (!std::isfinite(loss))
      throw TrainingError("training diverged: non-finite loss at step " + std::to_string(step));
    result.curve.emplace_back(step, loss);

    const double t = static_cast<double>(step);
    const double corr1 = 1.0 - std::pow(cfg.beta1, t);
    const double corr2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t k = 0; k < result.params.W.size(); ++k) {
      m1.W[k] = cfg.beta1 * m1.W[k] + (1.0 - cfg.beta1) * grad.W[k];
      m2.W[k] = cfg.beta2 * m2.W[k].array().matrix() +
                (1.0 - cfg.beta2) * grad.W[k].array().square().matrix();
      result.params.W[k].array() -= cfg.learning_rate * (m1.W[k].array() / corr1) /
                                    ((m2.W[k].array() / corr2).sqrt() + cfg.adam_epsilon);
      m1.b[k] = cfg.beta1 * m1.b[k] + (1.0 - cfg.beta1) * grad.b[k];
      m2.b[k] = cfg.beta2 * m2.b[k].array().matrix() +
                (1.0 - cfg.beta2) * grad.b[k].array().square().matrix();
      result.params.b[k].array() -= cfg.learning_rate * (m1.b[k].array() / corr1) /
                                    ((m2.b[k].array() / corr2).sqrt() + cfg.adam_epsilon);
    }
  }

  result.final_loss = hnn_loss(result.params, data);
  if (!std::isfinite(result.final_loss))
    throw TrainingError("training diverged: non-finite final loss");
  if (!(result.final_loss < result.initial_loss))
    throw TrainingError("training made no progress: final loss " +
                        std::to_string(result.final_loss) + " >= initial loss " +
                        std::to_string(result.initial_loss));
  return result;
}

}  // namespace lhnn
