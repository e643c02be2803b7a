// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pnf/measure.hpp"
#include "pnf/random.hpp"
#include "pnf/stack.hpp"

namespace pnf {

/// Geometric noise levels sigma_1 > ... > sigma_L with step sizes
/// eta_i = delta * sigma_i^2 / sigma_L^2 and T Langevin steps per level.
struct NoiseSchedule {
  std::vector<double> sigmas;
  double delta = 0.0;
  std::size_t steps_per_level = 0;

  std::size_t levels() const noexcept { return sigmas.size(); }
  double eta(std::size_t level) const noexcept {
    const double ratio = sigmas[level] / sigmas.back();
    return delta * ratio * ratio;
  }
};

/// sigma_i = sigma1 (sigmaL / sigma1)^{i / (L - 1)}, i = 0..L-1; the end points are exact.
NoiseSchedule make_schedule(double sigma1, double sigmaL, std::size_t levels, double delta,
                            std::size_t steps_per_level);

/// The iterate shared by sampler workers. Element reads and writes through
/// load/store are relaxed atomics, so concurrent unsynchronized access is
/// well defined (individual words never tear).
class SequenceBuffer {
 public:
  explicit SequenceBuffer(std::size_t n = 0) : data_(n, 0.0) {}
  explicit SequenceBuffer(std::vector<double> values) : data_(std::move(values)) {}

  std::size_t size() const noexcept { return data_.size(); }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::vector<double> release() noexcept { return std::move(data_); }

  double load(std::size_t i) const noexcept {
    return std::atomic_ref<const double>(data_[i]).load(std::memory_order_relaxed);
  }
  void store(std::size_t i, double v) noexcept {
    std::atomic_ref<double>(data_[i]).store(v, std::memory_order_relaxed);
  }
  bool all_finite() const noexcept;

 private:
  std::vector<double> data_;
};

/// x += eta (score + likelihood_grad) + sqrt(2 eta) eps with eps ~ N(0, I)
/// drawn from `rng` in coordinate order. `likelihood_grad` may be empty.
/// Throws DivergenceError (tagged with `level`/`step`) on a non-finite
/// gradient or iterate.
void langevin_step(SequenceBuffer& x, std::span<const double> score,
                   std::span<const double> likelihood_grad, double eta, Rng& rng,
                   std::size_t level = 0, std::size_t step = 0);

/// Same update with caller-supplied noise.
void langevin_step(SequenceBuffer& x, std::span<const double> score,
                   std::span<const double> likelihood_grad, double eta,
                   std::span<const double> noise, std::size_t level = 0, std::size_t step = 0);

/// A sampling problem: one stack per source (concatenated in the iterate, each
/// of length n) and an optional linear observation y = A x.
struct PnfProblem {
  std::vector<const NoisyModelStack*> stacks;
  const MeasurementModel* measurement = nullptr;
  std::span<const double> y;
  std::size_t n = 0;

  std::size_t sources() const noexcept { return stacks.size(); }
  std::size_t dimension() const noexcept { return stacks.size() * n; }
  bool conditioned() const noexcept { return measurement != nullptr; }

  /// Throws ConfigError if a stack's sigmas differ from the schedule and
  /// InvalidArgument on inconsistent sizes.
  void validate(const NoiseSchedule& schedule) const;
};

/// Called after every completed level with the current iterate.
using LevelObserver = std::function<void(std::size_t level, std::span<const double> x)>;

/// Annealed Langevin dynamics: x ~ N(0, sigma_1^2 I), then T steps per level
/// with the level's models (loaded one level at a time). Returns the final
/// un-quantized iterate (sources concatenated).
std::vector<double> run_pnf(const PnfProblem& problem, const NoiseSchedule& schedule, Rng& rng,
                            const LevelObserver& observer = {});

/// Single-source convenience form; `mm` may be null (unconditional).
std::vector<double> run_pnf(const NoisyModelStack& stack, const MeasurementModel* mm,
                            std::span<const double> y, const NoiseSchedule& schedule,
                            std::size_t n, Rng& rng, const LevelObserver& observer = {});

}  // namespace pnf
