// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnf/block_sampler.hpp"
#include "pnf/conv_net.hpp"
#include "pnf/grid.hpp"
#include "pnf/harness/synthetic.hpp"
#include "pnf/measure.hpp"
#include "pnf/sampler.hpp"
#include "pnf/training.hpp"

namespace pnf::harness {

enum class Task { train, finetune, sample, sample_stochastic, separate, superres, inpaint, eval_ll, bench };

/// CLI spelling ("sample-stochastic", "eval-ll", ...). parse_task throws ConfigError.
const char* task_name(Task task) noexcept;
Task parse_task(const std::string& name);

struct GridConfig {
  std::size_t d = 16;
  bool mu_law = false;
  double lo = -1.0;
  double hi = 1.0;
  double mu = 255.0;

  DiscretizationGrid build() const;
};

struct ModelConfig {
  /// "neural" (CausalConvNet trained by SGD) or "tabular" (count-based order-k chain).
  std::string kind = "neural";
  ConvNetConfig network;
  std::size_t order = 1;       // tabular
  double pseudocount = 0.1;    // tabular additive smoothing
  std::size_t exact_window = 64;  // history of the exact noisy tabular conditionals
};

struct ScheduleConfig {
  double sigma1 = 1.0;
  double sigmaL = 0.01;
  std::size_t levels = 10;
  double delta = 1e-5;
  std::size_t steps = 100;

  NoiseSchedule build() const;
};

struct MeasurementConfig {
  std::string kind;  // mix | decimate | mask; empty = none
  std::vector<double> weights{1.0, 1.0};
  std::size_t ratio = 4;
  std::filesystem::path mask_file;
  /// Without a mask file: the centered fraction of positions left unobserved.
  double gap = 0.25;
  bool isotropic = false;
};

struct BlockSettings {
  std::size_t c = 256;
  std::size_t workers = 1;
  BlockMode mode = BlockMode::async;
};

/// One experiment. Every key of the JSON document is optional except
/// "task"; unknown keys are rejected.
struct ExperimentConfig {
  Task task = Task::sample;
  std::uint64_t seed = 0;
  std::size_t runs = 1;
  std::size_t n = 64;
  std::filesystem::path out = "out";

  GridConfig grid;
  SourceConfig source;                // train corpus / ground truth signals
  std::vector<SourceConfig> sources;  // separate: one per stack
  std::size_t heldout = 0;            // extra sequences for held-out loss

  ModelConfig model;
  TrainConfig training;
  TrainConfig finetune;

  std::vector<std::filesystem::path> model_paths;  // base checkpoints (train output, eval-ll)
  std::vector<std::filesystem::path> stack_paths;  // noise-level stacks
  std::filesystem::path samples;                   // eval-ll input

  ScheduleConfig schedule;
  MeasurementConfig measurement;
  BlockSettings block;
  std::vector<std::size_t> bench_workers{1, 2, 4};
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// The fully resolved configuration, defaults included. parse_config(to_json(c))
/// reproduces c.
nlohmann::json to_json(const ExperimentConfig& config);

/// 64-bit FNV-1a of the canonical (key-sorted, compact) dump.
std::uint64_t config_hash(const nlohmann::json& doc);
std::string hash_hex(std::uint64_t hash);

}  // namespace pnf::harness
