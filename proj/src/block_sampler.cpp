// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/block_sampler.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "pnf/error.hpp"
#include "pnf/simd/kernels.hpp"
#include "pnf/smoothing.hpp"

namespace pnf {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

struct Window {
  std::size_t lo;
  std::size_t hi;
};

Window context_window(std::size_t n, std::size_t w, std::size_t j, std::size_t c) {
  return {j >= w ? j - w : 0, std::min(n, j + c + w)};
}

// Block gradient from a slice x[lo, lo + |slice|) of a length-n sequence.
void slice_gradient(const ConditionalModel& model, std::span<const double> slice, std::size_t lo,
                    std::size_t j, std::size_t c, double sigma, std::span<double> out,
                    std::vector<double>& scratch, BlockWork* work) {
  scratch.resize(slice.size());
  const std::size_t begin = j - lo;
  partial_score(model, slice, sigma, begin, slice.size(), begin, begin + c, scratch);
  std::copy_n(scratch.begin() + static_cast<std::ptrdiff_t>(begin), c, out.begin());
  if (work != nullptr) {
    work->reads += slice.size();
    work->conditional_evals += slice.size() - begin;
  }
}

std::size_t blocks_per_source(std::size_t n, std::size_t c) { return (n + c - 1) / c; }

void check_config(const PnfProblem& problem, const BlockConfig& config) {
  if (config.c == 0) throw InvalidArgument("block length must be positive");
  if (config.c > problem.n) throw InvalidArgument("block length exceeds the sequence length");
  if (config.workers == 0) throw InvalidArgument("at least one worker is required");
}

// Releases the previous level's models before loading the next.
void load_level(const PnfProblem& problem, std::size_t level,
                std::vector<NoisyModelStack::Model>& models) {
  for (auto& m : models) m.reset();
  for (std::size_t s = 0; s < problem.sources(); ++s) models[s] = problem.stacks[s]->load(level);
}

// ---------------------------------------------------------------- sync mode

void run_sync_level(const PnfProblem& problem, const std::vector<NoisyModelStack::Model>& models,
                    const NoiseSchedule& schedule, std::size_t level, const BlockConfig& config,
                    SequenceBuffer& x, Rng& rng, LevelStats& stats) {
  const std::size_t n = problem.n;
  const std::size_t dim = problem.dimension();
  const std::size_t c = config.c;
  const double sigma = schedule.sigmas[level];
  const double eta = schedule.eta(level);
  const std::size_t per_source = blocks_per_source(n, c);
  const std::size_t total_blocks = per_source * problem.sources();
  const std::size_t helpers = std::min(config.workers, total_blocks) - 1;

  std::vector<double> frozen(dim);
  std::vector<double> score(dim);
  std::vector<double> lik(problem.conditioned() ? dim : 0);
  std::vector<BlockWork> work(helpers + 1);
  std::vector<std::exception_ptr> errors(helpers + 1);

  auto compute = [&](std::size_t worker) {
    std::vector<double> scratch;
    try {
      for (std::size_t b = worker; b < total_blocks; b += helpers + 1) {
        const std::size_t s = b / per_source;
        const std::size_t j = (b % per_source) * c;
        const std::size_t len = std::min(c, n - j);
        const std::span<const double> xs(frozen.data() + s * n, n);
        const auto win = context_window(n, models[s]->window(), j, len);
        slice_gradient(*models[s], xs.subspan(win.lo, win.hi - win.lo), win.lo, j, len, sigma,
                       std::span<double>(score).subspan(s * n + j, len), scratch, &work[worker]);
        if (problem.conditioned()) {
          problem.measurement->block_likelihood_grad(
              frozen, problem.y, sigma, s * n + j, len,
              std::span<double>(lik).subspan(s * n + j, len));
        }
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };

  std::atomic<bool> stop{false};
  std::barrier sync_point(static_cast<std::ptrdiff_t>(helpers + 1));
  std::vector<std::jthread> threads;
  for (std::size_t h = 1; h <= helpers; ++h) {
    threads.emplace_back([&, h] {
      for (;;) {
        sync_point.arrive_and_wait();
        if (stop.load()) return;
        compute(h);
        sync_point.arrive_and_wait();
      }
    });
  }
  auto shutdown = [&] {
    stop.store(true);
    if (helpers > 0) sync_point.arrive_and_wait();
    threads.clear();
  };

  for (std::size_t t = 0; t < schedule.steps_per_level; ++t) {
    std::copy(x.data().begin(), x.data().end(), frozen.begin());
    if (helpers > 0) sync_point.arrive_and_wait();
    compute(0);
    if (helpers > 0) sync_point.arrive_and_wait();
    for (const auto& e : errors) {
      if (e) {
        shutdown();
        std::rethrow_exception(e);
      }
    }
    try {
      langevin_step(x, score, lik, eta, rng, level, t);
    } catch (...) {
      shutdown();
      throw;
    }
    stats.block_updates += total_blocks;
    stats.element_writes += dim;
  }
  shutdown();
  for (const auto& w : work) {
    stats.reads += w.reads;
    stats.conditional_evals += w.conditional_evals;
  }
  stats.workers_finished = helpers + 1;
}

// --------------------------------------------------------------- async mode

struct AsyncShared {
  const PnfProblem& problem;
  const std::vector<NoisyModelStack::Model>& models;
  SequenceBuffer& x;
  std::size_t c;
  std::size_t level;
  double sigma;
  double eta;
  // Start of the block each worker has read and not yet written (-1: none),
  // and of the block it is currently writing.
  std::vector<std::atomic<std::int64_t>> claim;
  std::vector<std::atomic<std::int64_t>> writing;
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;

  AsyncShared(const PnfProblem& p, const std::vector<NoisyModelStack::Model>& m, SequenceBuffer& buf,
              std::size_t block, std::size_t lvl, double sig, double step, std::size_t workers)
      : problem(p), models(m), x(buf), c(block), level(lvl), sigma(sig), eta(step),
        claim(workers), writing(workers) {
    for (auto& v : claim) v.store(-1);
    for (auto& v : writing) v.store(-1);
  }

  void fail(std::exception_ptr e) {
    std::lock_guard lock(error_mutex);
    if (!error) error = std::move(e);
    failed.store(true);
  }
};

std::size_t interval_overlap(std::int64_t a, std::int64_t b, std::size_t len) {
  const std::int64_t lo = std::max(a, b);
  const std::int64_t hi = std::min(a, b) + static_cast<std::int64_t>(len);
  return hi > lo ? static_cast<std::size_t>(hi - lo) : 0;
}

void async_worker(AsyncShared& sh, std::size_t worker, std::size_t updates, Rng rng,
                  LevelStats& local) {
  const auto& problem = sh.problem;
  const std::size_t n = problem.n;
  const std::size_t c = sh.c;
  const std::size_t sources = problem.sources();
  const auto& k = simd::active();
  const double noise_scale = std::sqrt(2.0 * sh.eta);

  std::uniform_int_distribution<std::size_t> pick_start(0, n - c);
  std::uniform_int_distribution<std::size_t> pick_source(0, sources - 1);
  std::vector<double> slice, scratch, grad(c), lik(c), noise(c), values(c);
  std::vector<double> lik_view(problem.conditioned() ? problem.dimension() : 0, 0.0);
  BlockWork work;

  for (std::size_t u = 0; u < updates; ++u) {
    if (sh.failed.load(std::memory_order_relaxed)) return;
    const std::size_t s = sources > 1 ? pick_source(rng) : 0;
    const std::size_t j = pick_start(rng);
    const std::size_t base = s * n;
    const auto start = static_cast<std::int64_t>(base + j);
    const auto& model = *sh.models[s];
    sh.claim[worker].store(start);

    const auto win = context_window(n, model.window(), j, c);
    slice.resize(win.hi - win.lo);
    for (std::size_t i = 0; i < slice.size(); ++i) slice[i] = sh.x.load(base + win.lo + i);
    slice_gradient(model, slice, win.lo, j, c, sh.sigma, grad, scratch, &work);

    if (problem.conditioned()) {
      // The likelihood of outputs touching the block reads the block itself
      // and, for mixtures, the same positions of the other sources.
      const std::size_t first = problem.measurement->kind() == MeasurementModel::Kind::mix ? 0 : s;
      const std::size_t last = problem.measurement->kind() == MeasurementModel::Kind::mix ? sources : s + 1;
      for (std::size_t q = first; q < last; ++q) {
        for (std::size_t i = 0; i < c; ++i) lik_view[q * n + j + i] = sh.x.load(q * n + j + i);
      }
      problem.measurement->block_likelihood_grad(lik_view, problem.y, sh.sigma, base + j, c, lik);
      for (std::size_t i = 0; i < c; ++i) grad[i] += lik[i];
    }
    for (double g : grad) {
      if (!std::isfinite(g)) throw DivergenceError(sh.level, u, worker);
    }

    fill_standard_normal(rng, noise);
    std::copy_n(slice.begin() + static_cast<std::ptrdiff_t>(j - win.lo), c, values.begin());
    k.langevin(values.data(), grad.data(), noise.data(), sh.eta, noise_scale, c);
    for (double v : values) {
      if (!std::isfinite(v)) throw DivergenceError(sh.level, u, worker);
    }

    sh.writing[worker].store(start);
    bool concurrent = false;
    std::size_t overwritten = 0;
    for (std::size_t o = 0; o < sh.claim.size(); ++o) {
      if (o == worker) continue;
      const auto other_write = sh.writing[o].load();
      if (other_write >= 0 && interval_overlap(start, other_write, c) > 0) concurrent = true;
      const auto other_claim = sh.claim[o].load();
      if (other_claim >= 0) overwritten += interval_overlap(start, other_claim, c);
    }
    for (std::size_t i = 0; i < c; ++i) sh.x.store(base + j + i, values[i]);
    sh.writing[worker].store(-1);
    sh.claim[worker].store(-1);

    ++local.block_updates;
    local.element_writes += c;
    local.overwritten_writes += std::min(overwritten, c);
    local.concurrent_writes += concurrent ? 1 : 0;
  }
  local.reads += work.reads;
  local.conditional_evals += work.conditional_evals;
}

void run_async_level(const PnfProblem& problem, const std::vector<NoisyModelStack::Model>& models,
                     const NoiseSchedule& schedule, std::size_t level, const BlockConfig& config,
                     SequenceBuffer& x, std::uint64_t seed,
                     std::vector<std::atomic<std::size_t>>& finished, LevelStats& stats) {
  const std::size_t workers = config.workers;
  const std::size_t total = schedule.steps_per_level * problem.sources() *
                            blocks_per_source(problem.n, config.c);
  AsyncShared shared(problem, models, x, config.c, level, schedule.sigmas[level],
                     schedule.eta(level), workers);
  std::vector<LevelStats> local(workers);

  {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t updates = total / workers + (w < total % workers ? 1 : 0);
      threads.emplace_back([&, w, updates] {
        if (level > 0 && finished[level - 1].load() != workers) ++local[w].early_starts;
        try {
          async_worker(shared, w, updates, make_rng(seed, {level, w}), local[w]);
        } catch (...) {
          shared.fail(std::current_exception());
        }
        finished[level].fetch_add(1);
      });
    }
  }
  if (shared.error) std::rethrow_exception(shared.error);

  for (const auto& l : local) {
    stats.block_updates += l.block_updates;
    stats.element_writes += l.element_writes;
    stats.overwritten_writes += l.overwritten_writes;
    stats.concurrent_writes += l.concurrent_writes;
    stats.reads += l.reads;
    stats.conditional_evals += l.conditional_evals;
    stats.early_starts += l.early_starts;
  }
  stats.workers_finished = finished[level].load();
  if (!x.all_finite()) throw DivergenceError(level, schedule.steps_per_level);
}

}  // namespace

std::vector<double> block_gradient(const ConditionalModel& model, std::span<const double> x,
                                   std::size_t j, std::size_t c, double sigma, BlockWork* work) {
  const std::size_t n = x.size();
  if (c == 0 || j >= n || c > n - j) throw InvalidArgument("block out of range");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
  const auto win = context_window(n, model.window(), j, c);
  const auto slice = x.subspan(win.lo, win.hi - win.lo);
  require_finite(slice, "sequence");
  std::vector<double> out(c);
  std::vector<double> scratch;
  slice_gradient(model, slice, win.lo, j, c, sigma, out, scratch, work);
  return out;
}

bool sparse_updates(std::size_t n, std::size_t c, std::size_t workers) noexcept {
  return c > 0 && workers * 4 * c <= n;
}

double StochasticStats::overwrite_fraction() const noexcept {
  std::uint64_t hit = 0, total = 0;
  for (const auto& l : levels) {
    hit += l.overwritten_writes;
    total += l.element_writes;
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

double StochasticStats::concurrent_write_fraction() const noexcept {
  std::uint64_t hit = 0, total = 0;
  for (const auto& l : levels) {
    hit += l.concurrent_writes;
    total += l.block_updates;
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

double StochasticStats::wall_ms() const noexcept {
  double t = 0.0;
  for (const auto& l : levels) t += l.wall_ms;
  return t;
}

std::vector<double> run_stochastic_pnf(const PnfProblem& problem, const NoiseSchedule& schedule,
                                       const BlockConfig& config, Rng& rng,
                                       StochasticStats* stats, const LevelObserver& observer) {
  problem.validate(schedule);
  check_config(problem, config);
  const std::size_t dim = problem.dimension();

  SequenceBuffer x(standard_normal(rng, dim));
  for (double& v : x.data()) v *= schedule.sigmas.front();
  const std::uint64_t worker_seed = config.mode == BlockMode::async ? rng() : 0;

  StochasticStats local_stats;
  local_stats.levels.resize(schedule.levels());
  std::vector<std::atomic<std::size_t>> finished(schedule.levels());
  std::vector<NoisyModelStack::Model> models(problem.sources());
  for (std::size_t level = 0; level < schedule.levels(); ++level) {
    load_level(problem, level, models);
    auto& ls = local_stats.levels[level];
    const auto t0 = Clock::now();
    if (config.mode == BlockMode::sync) {
      run_sync_level(problem, models, schedule, level, config, x, rng, ls);
    } else {
      run_async_level(problem, models, schedule, level, config, x, worker_seed, finished, ls);
    }
    ls.wall_ms = elapsed_ms(t0);
    if (observer) observer(level, x.data());
  }
  if (stats != nullptr) *stats = std::move(local_stats);
  return x.release();
}

std::vector<BenchRow> throughput_bench(
    const PnfProblem& problem, const NoiseSchedule& schedule, std::size_t c, BlockMode mode,
    std::span<const std::size_t> worker_counts, std::uint64_t seed,
    const std::function<double(std::span<const double>)>& evaluate) {
  std::vector<BenchRow> rows;
  for (std::size_t workers : worker_counts) {
    Rng rng = make_rng(seed);
    StochasticStats stats;
    const auto x = run_stochastic_pnf(problem, schedule, {c, workers, mode}, rng, &stats);
    const double ll = evaluate ? evaluate(x) : 0.0;
    for (std::size_t level = 0; level < stats.levels.size(); ++level) {
      const auto& l = stats.levels[level];
      const double frac = l.element_writes == 0
                              ? 0.0
                              : static_cast<double>(l.overwritten_writes) /
                                    static_cast<double>(l.element_writes);
      rows.push_back({workers, problem.n, c, level, l.wall_ms, frac, ll});
    }
  }
  return rows;
}

}  // namespace pnf
