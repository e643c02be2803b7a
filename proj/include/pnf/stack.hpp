// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "pnf/model.hpp"

namespace pnf {

/// One noisy conditional per noise level, sigma_1 > ... > sigma_L.
///
/// A file-backed stack reads one model per load() call, so only the level
/// being sampled is resident. An in-memory stack hands out shared models.
///
/// File layout: "PNFS", u32 version, u32 L, L f64 sigmas, then L model blocks.
class NoisyModelStack {
 public:
  using Model = std::shared_ptr<const ConditionalModel>;

  static NoisyModelStack in_memory(std::vector<double> sigmas, std::vector<Model> models);
  /// Reads the header and checks every block; models are not kept.
  static NoisyModelStack open(const std::filesystem::path& path);

  std::size_t levels() const noexcept { return sigmas_.size(); }
  std::span<const double> sigmas() const noexcept { return sigmas_; }
  const DiscretizationGrid& grid() const noexcept { return *grid_; }
  /// Largest Markov window over the levels.
  std::size_t window() const noexcept { return window_; }

  /// Model for 0-based `level`.
  Model load(std::size_t level) const;

  bool file_backed() const noexcept { return !path_.empty(); }

 private:
  NoisyModelStack() = default;

  std::vector<double> sigmas_;
  std::vector<Model> models_;
  std::filesystem::path path_;
  std::vector<std::streamoff> offsets_;
  std::shared_ptr<const DiscretizationGrid> grid_;
  std::size_t window_ = 0;
};

/// Writes a stack file; `model_at(level)` is called once per level in order,
/// so models can be produced (e.g. fine-tuned) and released one at a time.
void save_stack(const std::filesystem::path& path, std::span<const double> sigmas,
                const std::function<NoisyModelStack::Model(std::size_t)>& model_at);

}  // namespace pnf
