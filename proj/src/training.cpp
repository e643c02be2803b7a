// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pnf/error.hpp"

namespace pnf {
namespace {

std::size_t total_positions(const Corpus& corpus) {
  std::size_t total = 0;
  for (const auto& s : corpus) total += s.size();
  return total;
}

std::vector<double> noisy_values(const DiscretizationGrid& grid,
                                 std::span<const std::uint32_t> bins, double sigma, Rng& rng) {
  std::vector<double> x(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) x[i] = grid[bins[i]];
  if (sigma > 0.0) {
    std::normal_distribution<double> normal(0.0, sigma);
    for (double& v : x) v += normal(rng);
  }
  return x;
}

TrainReport run_training(CausalConvNet& net, double sigma, const Corpus& corpus,
                         const Corpus& heldout, const TrainConfig& config, std::uint64_t tag) {
  if (total_positions(corpus) == 0) throw InvalidArgument("training corpus is empty");
  if (config.segment_length == 0 || config.batch_size == 0) {
    throw InvalidArgument("segment length and batch size must be positive");
  }
  if (!(config.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  const auto& grid = net.grid();
  const std::size_t d = grid.size();
  for (const auto& s : corpus) {
    for (auto b : s) {
      if (b >= d) throw InvalidArgument("corpus bin outside the grid");
    }
  }

  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!corpus[i].empty()) usable.push_back(i);
  }

  Rng rng = make_rng(config.seed, {tag});
  const std::size_t w = net.window();
  const std::size_t seg = config.segment_length;
  const std::size_t segments = std::max<std::size_t>(1, (total_positions(corpus) + seg - 1) / seg);
  const std::size_t steps = (segments + config.batch_size - 1) / config.batch_size;

  TrainReport report;
  if (!heldout.empty()) report.initial_heldout = mean_cross_entropy(net, heldout, sigma, config.seed);

  std::vector<double> grad(net.param_count());
  std::vector<double> prob(d);
  std::uniform_int_distribution<std::size_t> pick(0, usable.size() - 1);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t step = 0; step < steps; ++step) {
      std::fill(grad.begin(), grad.end(), 0.0);
      std::size_t scored = 0;
      for (std::size_t b = 0; b < config.batch_size; ++b) {
        const auto& seq = corpus[usable[pick(rng)]];
        const std::size_t len = std::min(seg, seq.size());
        const std::size_t start =
            std::uniform_int_distribution<std::size_t>(0, seq.size() - len)(rng);
        const std::size_t from = start >= w ? start - w : 0;
        const std::span<const std::uint32_t> window(seq.data() + from, start + len - from);
        const auto x = noisy_values(grid, window, sigma, rng);
        const auto pass = net.forward(x);
        Matrix upstream(x.size(), d);
        for (std::size_t i = start - from; i < x.size(); ++i) {
          const auto logits = pass->logits().row(i);
          softmax(logits, prob);
          const std::uint32_t target = window[i];
          loss_sum += log_sum_exp(logits) - logits[target];
          ++loss_count;
          auto up = upstream.row(i);
          for (std::size_t k = 0; k < d; ++k) up[k] = prob[k];
          up[target] -= 1.0;
        }
        scored += len;
        net.backward(*pass, upstream, grad, {});
      }
      const double inv = 1.0 / static_cast<double>(scored);
      double norm2 = 0.0;
      for (double& g : grad) {
        g *= inv;
        norm2 += g * g;
      }
      double scale = config.learning_rate;
      const double norm = std::sqrt(norm2);
      if (config.clip_norm > 0.0 && norm > config.clip_norm) scale *= config.clip_norm / norm;
      auto params = net.params();
      for (std::size_t p = 0; p < params.size(); ++p) params[p] -= scale * grad[p];
    }
    report.epoch_loss.push_back(loss_sum / static_cast<double>(loss_count));
  }
  if (!heldout.empty()) report.final_heldout = mean_cross_entropy(net, heldout, sigma, config.seed);
  return report;
}

}  // namespace

TrainReport train(CausalConvNet& net, const Corpus& corpus, const Corpus& heldout,
                  const TrainConfig& config) {
  return run_training(net, 0.0, corpus, heldout, config, 0x7261696e);
}

TrainReport finetune_noisy(CausalConvNet& net, double sigma, const Corpus& corpus,
                           const Corpus& heldout, const TrainConfig& config) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
  return run_training(net, sigma, corpus, heldout, config, 0x6e6f6973);
}

double mean_cross_entropy(const ConditionalModel& model, const Corpus& corpus, double sigma,
                          std::uint64_t seed) {
  Rng rng = make_rng(seed, {0x68656c64});
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& seq : corpus) {
    if (seq.empty()) continue;
    const auto x = noisy_values(model.grid(), seq, sigma, rng);
    const auto pass = model.forward(x);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const auto logits = pass->logits().row(i);
      sum += log_sum_exp(logits) - logits[seq[i]];
      ++count;
    }
  }
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  return sum / static_cast<double>(count);
}

}  // namespace pnf
