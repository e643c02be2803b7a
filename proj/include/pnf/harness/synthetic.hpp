// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pnf/tabular.hpp"
#include "pnf/training.hpp"

namespace pnf::harness {

enum class SourceKind { ar_tabular, sine_mixture, bursty_noise };

SourceKind parse_source_kind(const std::string& name);
const char* source_kind_name(SourceKind kind) noexcept;

/// Desk-scale synthetic data. Signals are generated in real values and then
/// snapped to the grid.
struct SourceConfig {
  SourceKind kind = SourceKind::ar_tabular;
  std::size_t count = 100;
  std::size_t length = 256;
  std::uint64_t seed = 0;

  // ar_tabular: a checkpointed tabular model, or a Gaussian random walk
  // x' ~ N(rho x, spread^2) restricted to the grid.
  std::filesystem::path table;
  double rho = 0.9;
  double spread = 0.2;

  // sine_mixture: `components` sinusoids with frequencies uniform in
  // [f_lo, cutoff) cycles per sample, random phases and amplitudes; the sum is
  // rescaled to peak `amplitude`.
  std::size_t components = 2;
  double f_lo = 0.01;
  double cutoff = 0.1;
  double amplitude = 0.9;

  // bursty_noise: x_t = ar x_{t-1} + background e_t + b_t burst_scale e'_t with
  // b_t ~ Bernoulli(burst_prob), clipped to the grid range.
  double burst_prob = 0.02;
  double burst_scale = 0.5;
  double ar = 0.5;
  double background = 0.01;
};

/// The generating chain of an ar_tabular source.
TabularMarkovModel source_table(const SourceConfig& config, const DiscretizationGrid& grid);

/// `count` ancestral sequences of length `length` from `model`.
Corpus sample_corpus(const TabularMarkovModel& model, std::size_t length, std::size_t count,
                     std::uint64_t seed);

/// Grid-valued signals (count x length).
std::vector<std::vector<double>> synthetic_signals(const SourceConfig& config,
                                                   const DiscretizationGrid& grid);

/// The same signals as bin indices.
Corpus synthetic_corpus(const SourceConfig& config, const DiscretizationGrid& grid);

}  // namespace pnf::harness
