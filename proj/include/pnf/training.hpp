// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pnf/conv_net.hpp"

namespace pnf {

/// Sequences of grid bin indices.
using Corpus = std::vector<std::vector<std::uint32_t>>;

struct TrainConfig {
  std::size_t epochs = 10;
  double learning_rate = 0.05;
  std::size_t batch_size = 16;      // segments per SGD step
  std::size_t segment_length = 64;  // positions scored per segment
  /// Gradients with a larger L2 norm are rescaled to this norm; 0 disables.
  double clip_norm = 5.0;
  std::uint64_t seed = 0;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean per-position training cross-entropy
  double initial_heldout = 0.0;
  double final_heldout = 0.0;
};

/// Maximum likelihood by plain SGD on random segments. Each segment is fed
/// with up to w positions of real history in front of it so its first
/// predictions see true context rather than padding.
TrainReport train(CausalConvNet& net, const Corpus& corpus, const Corpus& heldout,
                  const TrainConfig& config);

/// Continues training on (x + eps, x) pairs with eps ~ N(0, sigma^2 I) drawn
/// fresh for every segment, so the network learns p(x_i | noisy history).
TrainReport finetune_noisy(CausalConvNet& net, double sigma, const Corpus& corpus,
                           const Corpus& heldout, const TrainConfig& config);

/// Mean per-position cross-entropy (nats) of the clean targets given
/// histories corrupted with N(0, sigma^2) noise (sigma = 0: clean). The noise
/// is drawn from `seed`, so repeated calls compare models on identical inputs.
double mean_cross_entropy(const ConditionalModel& model, const Corpus& corpus, double sigma,
                          std::uint64_t seed = 0);

}  // namespace pnf
