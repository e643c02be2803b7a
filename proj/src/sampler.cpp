// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "pnf/error.hpp"
#include "pnf/simd/kernels.hpp"
#include "pnf/smoothing.hpp"

namespace pnf {

NoiseSchedule make_schedule(double sigma1, double sigmaL, std::size_t levels, double delta,
                            std::size_t steps_per_level) {
  if (!(sigmaL > 0.0) || !(sigma1 > sigmaL) || !std::isfinite(sigma1)) {
    throw InvalidArgument("schedule needs sigma1 > sigmaL > 0");
  }
  if (levels < 2) throw InvalidArgument("schedule needs at least two levels");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("delta must be positive");
  if (steps_per_level == 0) throw InvalidArgument("steps per level must be positive");
  NoiseSchedule s;
  s.delta = delta;
  s.steps_per_level = steps_per_level;
  s.sigmas.resize(levels);
  const double ratio = sigmaL / sigma1;
  for (std::size_t i = 0; i < levels; ++i) {
    s.sigmas[i] = sigma1 * std::pow(ratio, static_cast<double>(i) / static_cast<double>(levels - 1));
  }
  s.sigmas.front() = sigma1;
  s.sigmas.back() = sigmaL;
  return s;
}

bool SequenceBuffer::all_finite() const noexcept {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(load(i))) return false;
  }
  return true;
}

void langevin_step(SequenceBuffer& x, std::span<const double> score,
                   std::span<const double> likelihood_grad, double eta,
                   std::span<const double> noise, std::size_t level, std::size_t step) {
  const std::size_t n = x.size();
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("step size must be positive");
  if (score.size() != n || noise.size() != n ||
      (!likelihood_grad.empty() && likelihood_grad.size() != n)) {
    throw InvalidArgument("gradient and noise lengths must match the iterate");
  }
  std::vector<double> g(score.begin(), score.end());
  if (!likelihood_grad.empty()) {
    for (std::size_t i = 0; i < n; ++i) g[i] += likelihood_grad[i];
  }
  for (double v : g) {
    if (!std::isfinite(v)) throw DivergenceError(level, step);
  }
  simd::active().langevin(x.data().data(), g.data(), noise.data(), eta, std::sqrt(2.0 * eta), n);
  if (!x.all_finite()) throw DivergenceError(level, step);
}

void langevin_step(SequenceBuffer& x, std::span<const double> score,
                   std::span<const double> likelihood_grad, double eta, Rng& rng,
                   std::size_t level, std::size_t step) {
  const auto noise = standard_normal(rng, x.size());
  langevin_step(x, score, likelihood_grad, eta, noise, level, step);
}

void PnfProblem::validate(const NoiseSchedule& schedule) const {
  if (stacks.empty()) throw InvalidArgument("at least one model stack is required");
  if (n == 0) throw InvalidArgument("sequence length must be positive");
  if (schedule.levels() == 0 || schedule.steps_per_level == 0) {
    throw InvalidArgument("empty schedule");
  }
  for (const auto* s : stacks) {
    if (s == nullptr) throw InvalidArgument("null stack");
    const auto sig = s->sigmas();
    if (sig.size() != schedule.levels() ||
        !std::equal(sig.begin(), sig.end(), schedule.sigmas.begin())) {
      throw ConfigError("stack noise levels do not match the sampling schedule");
    }
  }
  if (measurement != nullptr) {
    if (measurement->n_in() != dimension()) {
      throw InvalidArgument("measurement input size does not match the sources");
    }
    if (measurement->kind() == MeasurementModel::Kind::mix &&
        measurement->sources() != sources()) {
      throw InvalidArgument("mixture source count does not match the stacks");
    }
    if (y.size() != measurement->n_out()) throw InvalidArgument("observation has the wrong length");
    require_finite(y, "observation");
  } else if (!y.empty()) {
    throw InvalidArgument("observation given without a measurement model");
  }
}

std::vector<double> run_pnf(const PnfProblem& problem, const NoiseSchedule& schedule, Rng& rng,
                            const LevelObserver& observer) {
  problem.validate(schedule);
  const std::size_t n = problem.n;
  const std::size_t dim = problem.dimension();

  SequenceBuffer x(standard_normal(rng, dim));
  for (double& v : x.data()) v *= schedule.sigmas.front();

  std::vector<double> score(dim);
  std::vector<NoisyModelStack::Model> models(problem.sources());
  for (std::size_t level = 0; level < schedule.levels(); ++level) {
    const double sigma = schedule.sigmas[level];
    const double eta = schedule.eta(level);
    // Drop the previous level before loading the next.
    for (auto& m : models) m.reset();
    for (std::size_t s = 0; s < problem.sources(); ++s) models[s] = problem.stacks[s]->load(level);
    for (std::size_t t = 0; t < schedule.steps_per_level; ++t) {
      for (std::size_t s = 0; s < problem.sources(); ++s) {
        const auto xs = x.data().subspan(s * n, n);
        const auto part = std::span<double>(score).subspan(s * n, n);
        partial_score(*models[s], xs, sigma, 0, n, 0, n, part);
      }
      if (problem.conditioned()) {
        const auto lik = problem.measurement->smoothed_likelihood_grad(x.data(), problem.y, sigma);
        langevin_step(x, score, lik.grad, eta, rng, level, t);
      } else {
        langevin_step(x, score, {}, eta, rng, level, t);
      }
    }
    if (observer) observer(level, x.data());
  }
  return x.release();
}

std::vector<double> run_pnf(const NoisyModelStack& stack, const MeasurementModel* mm,
                            std::span<const double> y, const NoiseSchedule& schedule,
                            std::size_t n, Rng& rng, const LevelObserver& observer) {
  PnfProblem p;
  p.stacks = {&stack};
  p.measurement = mm;
  p.y = y;
  p.n = n;
  return run_pnf(p, schedule, rng, observer);
}

}  // namespace pnf
