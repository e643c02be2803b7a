// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pnf/block_sampler.hpp"
#include "pnf/harness/config.hpp"
#include "pnf/stack.hpp"

namespace pnf::harness {

struct MetricRecord {
  std::uint64_t seed = 0;
  std::string task;
  std::size_t steps = 0;   // T
  std::size_t levels = 0;  // L
  double wall_ms = 0.0;
  std::optional<double> log_likelihood;  // nats, under the base model
  std::optional<double> si_sdr;
  std::optional<double> psnr;
  std::optional<double> constraint_residual;
};

/// A comparator evaluated on the same inputs as the PnF record of `seed`.
struct BaselineRecord {
  std::uint64_t seed = 0;
  std::string method;
  std::optional<double> si_sdr;
  std::optional<double> psnr;
};

struct MetricReport {
  std::string config_hash;
  std::vector<MetricRecord> records;
  std::vector<BaselineRecord> baselines;
  std::vector<BenchRow> bench;
  std::vector<std::string> warnings;
};

/// CSV schemas (header line included).
void write_metrics_csv(std::ostream& out, const MetricReport& report);
void write_baselines_csv(std::ostream& out, const MetricReport& report);
void write_bench_csv(std::ostream& out, const MetricReport& report);

/// Fits the base model of `config` to its source corpus.
std::unique_ptr<ConditionalModel> train_base_model(const ExperimentConfig& config,
                                                   TrainReport* report = nullptr);

/// One model per schedule level: exact Bayes conditionals for a tabular base,
/// noisy fine-tuned copies for a neural one.
NoisyModelStack build_stack(const ConditionalModel& base, const ExperimentConfig& config);

/// Runs the task, writes its outputs under config.out (config.json echo with
/// the hash, raw samples with sidecars, CSVs, checkpoints) and returns the
/// metrics. Throws ConfigError before any compute on a schedule mismatch.
MetricReport run_experiment(const ExperimentConfig& config);

/// 0 success, 2 configuration error, 3 divergence, 4 I/O error, 1 otherwise.
int exit_code(const std::exception& e) noexcept;

}  // namespace pnf::harness
