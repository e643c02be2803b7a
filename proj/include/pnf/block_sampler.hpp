// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pnf/sampler.hpp"

namespace pnf {

/// Work done by one block gradient: entries read from the sequence and
/// smoothed conditionals evaluated.
struct BlockWork {
  std::size_t reads = 0;
  std::size_t conditional_evals = 0;
};

/// The score of `x` restricted to [j, j + c). Reads only x[j - w, j + c + w)
/// (clipped), evaluates the conditionals of rows [j, j + c + w) and returns
/// exactly the corresponding entries of sequence_score.
std::vector<double> block_gradient(const ConditionalModel& model, std::span<const double> x,
                                   std::size_t j, std::size_t c, double sigma,
                                   BlockWork* work = nullptr);

enum class BlockMode { async, sync };

struct BlockConfig {
  std::size_t c = 256;
  std::size_t workers = 1;
  BlockMode mode = BlockMode::async;
};

/// True when async writes are expected to be sparse: workers <= n / (4c).
bool sparse_updates(std::size_t n, std::size_t c, std::size_t workers) noexcept;

struct LevelStats {
  double wall_ms = 0.0;
  std::uint64_t block_updates = 0;
  std::uint64_t element_writes = 0;
  /// Element writes landing inside a block another worker had read and not
  /// yet written back.
  std::uint64_t overwritten_writes = 0;
  /// Block writes whose write phase overlapped another worker's write phase
  /// on an intersecting range.
  std::uint64_t concurrent_writes = 0;
  std::uint64_t reads = 0;
  std::uint64_t conditional_evals = 0;
  /// Workers that completed this level, and workers that started it before
  /// every worker had completed the previous one.
  std::size_t workers_finished = 0;
  std::size_t early_starts = 0;
};

struct StochasticStats {
  std::vector<LevelStats> levels;

  double overwrite_fraction() const noexcept;
  double concurrent_write_fraction() const noexcept;
  double wall_ms() const noexcept;
};

/// Stochastic annealed Langevin sampling on blocks of length c.
///
/// async: per level, `workers` threads share the iterate; together they make
/// T * sum_s ceil(n / c) block updates (split evenly). Each update picks a
/// source and a start j uniformly from {0..n-c}, snapshots the context window,
/// and writes x[j, j+c) += eta g + sqrt(2 eta) eps element by element without
/// locks. Levels are separated by a join.
///
/// sync: every step tiles each source into ceil(n / c) blocks, computes all
/// block gradients against a frozen copy (spread over the workers) and applies
/// one full Langevin step. Deterministic and bit-identical to run_pnf under
/// the same seed.
std::vector<double> run_stochastic_pnf(const PnfProblem& problem, const NoiseSchedule& schedule,
                                       const BlockConfig& config, Rng& rng,
                                       StochasticStats* stats = nullptr,
                                       const LevelObserver& observer = {});

struct BenchRow {
  std::size_t workers = 0;
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t level = 0;
  double wall_ms = 0.0;
  double overwrite_fraction = 0.0;
  double final_ll = 0.0;
};

/// Runs the problem once per worker count and reports one row per level.
/// `final_ll` (same for all rows of a run) comes from `evaluate` applied to
/// the final iterate.
std::vector<BenchRow> throughput_bench(
    const PnfProblem& problem, const NoiseSchedule& schedule, std::size_t c, BlockMode mode,
    std::span<const std::size_t> worker_counts, std::uint64_t seed,
    const std::function<double(std::span<const double>)>& evaluate);

}  // namespace pnf
