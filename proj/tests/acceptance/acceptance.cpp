// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. `pnf_acceptance N` checks criterion N and prints one
// PASS/FAIL line; without arguments every criterion runs in order.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>

#include "pnf/ancestral.hpp"
#include "pnf/block_sampler.hpp"
#include "pnf/conv_net.hpp"
#include "pnf/harness/config.hpp"
#include "pnf/harness/experiment.hpp"
#include "pnf/harness/metrics.hpp"
#include "pnf/noisy_tabular.hpp"
#include "pnf/oracle.hpp"
#include "pnf/sampler.hpp"
#include "pnf/smoothing.hpp"

using namespace pnf;
namespace fs = std::filesystem;
namespace hs = pnf::harness;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path work_dir() {
  const char* env = std::getenv("PNF_ACCEPTANCE_DIR");
  fs::path p = env != nullptr ? fs::path(env) : fs::temp_directory_path() / "pnf_acceptance";
  fs::create_directories(p);
  return p;
}

NoisyModelStack exact_stack(const TabularMarkovModel& tab, const NoiseSchedule& s) {
  std::vector<NoisyModelStack::Model> models;
  for (double sigma : s.sigmas) models.push_back(std::make_shared<ExactNoisyMarkovModel>(tab, sigma));
  return NoisyModelStack::in_memory(s.sigmas, std::move(models));
}

std::uint64_t encode(std::span<const std::uint32_t> bins, std::size_t d) {
  std::uint64_t idx = 0;
  for (auto b : bins) idx = idx * d + b;
  return idx;
}

double rel_error(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double keep = x[j];
    x[j] = keep + h;
    const double a = f(x);
    x[j] = keep - h;
    const double b = f(x);
    x[j] = keep;
    g[j] = (a - b) / (2 * h);
  }
  return g;
}

CausalConvNet random_net(Rng& rng, std::size_t d, ConvNetConfig cfg, double scale) {
  CausalConvNet net(DiscretizationGrid::linear(d, -1, 1), std::move(cfg));
  std::normal_distribution<double> normal(0.0, scale);
  for (double& p : net.params()) p = normal(rng);
  return net;
}

std::vector<std::vector<double>> as_vectors(std::span<const double> flat, std::size_t n) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i + n <= flat.size(); i += n) out.emplace_back(flat.begin() + i, flat.begin() + i + n);
  return out;
}

// ------------------------------------------------------------------ 1

Outcome factorization_identity() {
  Rng gen = make_rng(101);
  const auto schedule = make_schedule(2.0, 0.05, 8, 1e-4, 1);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 3;
    const std::size_t n = 1 + (trial / 3) % 6;
    const std::size_t order = 1 + trial % 2;
    const auto grid = DiscretizationGrid::linear(d, -1, 1);
    const auto tab = TabularMarkovModel::random(grid, order, gen);
    const double sigma = schedule.sigmas[trial % schedule.levels()];
    // A typical point of the smoothed law: a chain draw plus Gaussian noise.
    const auto bins = ancestral_sample(tab, n, gen);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = grid[bins[i]] + sigma * normal(gen);
    const ExactNoisyMarkovModel noisy(tab, sigma, n);
    const double factorized = sequence_score(noisy, x, sigma).log_density;
    const double joint = oracle::exact_log_density(tab, x, sigma).log_density;
    worst = std::max(worst, std::abs(factorized - joint));
  }
  return {worst < 1e-10, fmt("max |factorized - joint| = %.3g nats over 100 instances (< 1e-10)", worst)};
}

// ------------------------------------------------------------------ 2

Outcome gradient_correctness() {
  Rng gen = make_rng(202);
  std::normal_distribution<double> normal;
  double neural = 0.0, tabular = 0.0, likelihood = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 4 + trial % 5;
    std::vector<std::size_t> dil{1, 2, 4};
    if (trial % 2) dil.push_back(8);
    const auto net = random_net(gen, d, {4 + static_cast<std::size_t>(trial % 3) * 2, 2, dil}, 0.4);
    const double sigma = 0.1 + 0.05 * (trial % 6);
    std::vector<double> x(12 + trial);
    for (double& v : x) v = 0.8 * normal(gen);
    const auto s = sequence_score(net, x, sigma);
    const auto fd = central_difference(
        [&](std::span<const double> z) { return sequence_score(net, z, sigma).log_density; }, x, 1e-5);
    neural = std::max(neural, rel_error(s.score, fd));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + trial % 3;
    const auto tab = TabularMarkovModel::random(DiscretizationGrid::linear(d, -1, 1), 1 + trial % 2, gen);
    const double sigma = 0.2 + 0.05 * (trial % 8);
    const ExactNoisyMarkovModel noisy(tab, sigma, 3 + trial % 4);
    std::vector<double> x(6 + trial % 7);
    for (double& v : x) v = 0.8 * normal(gen);
    const auto s = sequence_score(noisy, x, sigma);
    const auto fd = central_difference(
        [&](std::span<const double> z) { return sequence_score(noisy, z, sigma).log_density; }, x, 1e-5);
    tabular = std::max(tabular, rel_error(s.score, fd));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 8 + trial % 5;
    std::optional<MeasurementModel> mm;
    switch (trial % 3) {
      case 0: mm = MeasurementModel::mix({1.0, 0.5 + 0.1 * trial}, n); break;
      case 1: mm = MeasurementModel::decimate(2 + trial % 3, n); break;
      default: {
        std::vector<std::uint8_t> m(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = (i * 7 + trial) % 3 != 0;
        mm = MeasurementModel::mask(m);
      }
    }
    if (trial % 2) mm->set_covariance(MeasurementModel::Covariance::isotropic);
    const double sigma = 0.3 + 0.1 * (trial % 4);
    std::vector<double> x(mm->n_in()), y(mm->n_out());
    for (double& v : x) v = normal(gen);
    for (double& v : y) v = normal(gen);
    const auto r = mm->smoothed_likelihood_grad(x, y, sigma);
    const auto fd = central_difference(
        [&](std::span<const double> z) { return mm->smoothed_likelihood_grad(z, y, sigma).log_likelihood; },
        x, 1e-5);
    likelihood = std::max(likelihood, rel_error(r.grad, fd));
  }
  const bool pass = neural < 1e-4 && tabular < 1e-6 && likelihood < 1e-6;
  return {pass, fmt("max relative error: neural %.2e (< 1e-4), tabular %.2e (< 1e-6), likelihood %.2e (< 1e-6)",
                    neural, tabular, likelihood)};
}

// ------------------------------------------------------------------ 3

Outcome mixing_to_prior() {
  Rng gen = make_rng(303);
  const auto grid = DiscretizationGrid::from_values({-1.0, 1.0});
  const auto tab = TabularMarkovModel::random(grid, 1, gen);
  const auto s = make_schedule(3.0, 0.1, 10, 0.05 * 0.1 * 0.1, 256);
  const auto stack = exact_stack(tab, s);
  const std::size_t n = 4, runs = 1000;
  std::vector<double> hist(16, 0.0);
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng = make_rng(3000, {r});
    const auto x = run_pnf(stack, nullptr, {}, s, n, rng);
    hist[encode(grid.quantize(x), 2)] += 1.0 / runs;
  }
  const double tv = oracle::total_variation(hist, oracle::exact_distribution(tab, n));
  return {tv < 0.1, fmt("TV(PnF histogram, exact p) = %.4f over %zu seeds (< 0.1)", tv, runs)};
}

// ------------------------------------------------------------------ 4

Outcome posterior_correctness() {
  Rng gen = make_rng(404);
  const auto grid = DiscretizationGrid::from_values({-1.0, 1.0});
  const auto t1 = TabularMarkovModel::random(grid, 1, gen);
  const auto t2 = TabularMarkovModel::random(grid, 1, gen);
  const auto s = make_schedule(3.0, 0.1, 10, 0.2 * 0.1 * 0.1, 400);
  const auto s1 = exact_stack(t1, s), s2 = exact_stack(t2, s);
  const std::size_t n = 3, runs = 2000;
  const auto mm = MeasurementModel::mix({1.0, 1.0}, n);
  const std::vector<double> truth{1, -1, 1, -1, -1, 1};
  const auto y = mm.apply(truth);
  PnfProblem p;
  p.stacks = {&s1, &s2};
  p.measurement = &mm;
  p.y = y;
  p.n = n;
  std::vector<double> hist(64, 0.0);
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng = make_rng(4000, {r});
    hist[encode(grid.quantize(run_pnf(p, s, rng)), 2)] += 1.0 / runs;
  }
  const TabularMarkovModel* sources[] = {&t1, &t2};
  const double tv = oracle::total_variation(hist, oracle::exact_posterior(sources, mm, y, s.sigmas.back()));
  return {tv < 0.15, fmt("TV(PnF posterior histogram, exact posterior) = %.4f over %zu seeds (< 0.15)", tv, runs)};
}

// ------------------------------------------------------------------ 5

Outcome likelihood_trend() {
  hs::ExperimentConfig c;
  c.seed = 505;
  c.grid.d = 16;
  c.source.kind = hs::SourceKind::ar_tabular;
  c.source.rho = 0.9;
  c.source.spread = 0.15;
  c.source.count = 400;
  c.source.length = 128;
  c.source.seed = 55;
  c.model.network = {16, 2, {1, 2, 4, 8}};
  c.training = {60, 0.1, 16, 64, 5.0, 0};
  c.finetune = {4, 0.02, 16, 64, 5.0, 0};
  c.schedule = {1.0, 0.02, 10, 1e-4, 256};
  c.training.seed = c.finetune.seed = c.seed;

  const auto base = hs::train_base_model(c);
  const auto stack = hs::build_stack(*base, c);
  const std::size_t n = 64, samples = 50;

  std::vector<std::vector<double>> ancestral;
  const auto& grid = base->grid();
  for (std::size_t r = 0; r < samples; ++r) {
    Rng rng = make_rng(c.seed, {0xa, r});
    std::vector<double> x;
    for (auto b : ancestral_sample(*base, n, rng)) x.push_back(grid[b]);
    ancestral.push_back(std::move(x));
  }
  const double reference = hs::eval_ll(*base, ancestral).median / static_cast<double>(n);

  std::vector<double> medians;
  std::string detail;
  for (std::size_t T : {16, 64, 256}) {
    auto s = c.schedule.build();
    s.steps_per_level = T;
    std::vector<std::vector<double>> xs;
    for (std::size_t r = 0; r < samples; ++r) {
      Rng rng = make_rng(c.seed, {T, r});
      xs.push_back(run_pnf(stack, nullptr, {}, s, n, rng));
    }
    medians.push_back(hs::eval_ll(*base, xs).median / static_cast<double>(n));
    detail += fmt("T=%zu: %.4f  ", T, medians.back());
  }
  const bool monotone = medians[0] <= medians[1] && medians[1] <= medians[2];
  const double gap = std::abs(medians[2] - reference) / std::abs(reference);
  detail += fmt("ancestral: %.4f nats/position; non-decreasing=%s, relative gap at T=256 = %.3f (<= 0.10)",
                reference, monotone ? "yes" : "no", gap);
  return {monotone && gap <= 0.10, detail};
}

// ------------------------------------------------------------------ 6

Outcome block_exactness() {
  Rng gen = make_rng(606);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  bool invariant = true;
  for (int trial = 0; trial < 20; ++trial) {
    const bool neural = trial % 2 == 0;
    const std::size_t n = 40 + 7 * trial;
    std::unique_ptr<ConditionalModel> model;
    const double sigma = 0.15 + 0.02 * trial;
    if (neural) {
      model = std::make_unique<CausalConvNet>(random_net(gen, 6, {6, 2, {1, 2, 4}}, 0.4));
    } else {
      auto tab = TabularMarkovModel::random(DiscretizationGrid::linear(3, -1, 1), 1 + trial % 3 % 2, gen);
      model = std::make_unique<ExactNoisyMarkovModel>(tab, sigma, 5);
    }
    std::vector<double> x(n);
    for (double& v : x) v = normal(gen);
    const auto full = sequence_score(*model, x, sigma).score;
    // Random disjoint partition of [0, n).
    std::size_t j = 0;
    while (j < n) {
      const std::size_t c = std::min<std::size_t>(n - j, 1 + gen() % 17);
      const auto g = block_gradient(*model, x, j, c, sigma);
      for (std::size_t q = 0; q < c; ++q) worst = std::max(worst, std::abs(g[q] - full[j + q]));

      // Everything outside [j - w, j + c + w) is irrelevant.
      const std::size_t w = model->window();
      auto y = x;
      for (std::size_t i = 0; i < n; ++i) {
        if (i + w >= j && i < j + c + w) continue;
        y[i] = 50.0 * normal(gen);
      }
      invariant = invariant && block_gradient(*model, y, j, c, sigma) == g;
      j += c;
    }
  }
  return {worst <= 1e-10 && invariant,
          fmt("max |block - full| = %.3g (<= 1e-10); window invariance %s", worst,
              invariant ? "exact" : "VIOLATED")};
}

// ------------------------------------------------------------------ 7

Outcome parallel_speedup() {
  hs::ExperimentConfig c;
  c.seed = 707;
  c.grid.d = 16;
  c.source.rho = 0.9;
  c.source.spread = 0.15;
  c.source.count = 200;
  c.source.length = 128;
  c.source.seed = 77;
  c.model.network = {8, 2, {1, 2, 4, 8}};  // window 16
  c.training = {30, 0.1, 16, 64, 5.0, c.seed};
  c.finetune = {2, 0.02, 16, 64, 5.0, c.seed};
  c.schedule = {1.0, 0.02, 6, 1e-4, 24};
  const auto base = hs::train_base_model(c);
  const auto stack = hs::build_stack(*base, c);
  const auto schedule = c.schedule.build();
  const std::size_t n = 16384, blk = 512, runs = 3;

  PnfProblem p;
  p.stacks = {&stack};
  p.n = n;
  double wall[2] = {0.0, 0.0};
  std::vector<double> ll_async, ll_sync;
  const std::size_t counts[2] = {1, 4};
  for (std::size_t r = 0; r < runs; ++r) {
    for (int k = 0; k < 2; ++k) {
      Rng rng = make_rng(c.seed, {r});
      StochasticStats stats;
      const auto x = run_stochastic_pnf(p, schedule, {blk, counts[k], BlockMode::async}, rng, &stats);
      wall[k] += stats.wall_ms();
      if (k == 1) ll_async.push_back(hs::eval_ll(*base, as_vectors(x, n)).median);
    }
    Rng rng = make_rng(c.seed, {r});
    const auto x = run_stochastic_pnf(p, schedule, {blk, 4, BlockMode::sync}, rng);
    ll_sync.push_back(hs::eval_ll(*base, as_vectors(x, n)).median);
  }
  const double ratio = wall[1] / wall[0];
  const double a = hs::median(ll_async), s = hs::median(ll_sync);
  const double gap = std::abs(a - s) / std::abs(s);
  const unsigned cores = std::thread::hardware_concurrency();
  return {ratio <= 0.45 && gap <= 0.05,
          fmt("wall(4 workers)/wall(1 worker) = %.3f (<= 0.45) on %u hardware thread(s); "
              "median ll async %.1f vs sync %.1f nats, gap %.4f (<= 0.05)",
              ratio, cores, a, s, gap)};
}

// ------------------------------------------------------------------ 8 and 9

hs::ExperimentConfig restoration_config(const fs::path& dir) {
  hs::ExperimentConfig c;
  c.seed = 808;
  c.n = 64;
  c.runs = 10;
  c.heldout = 20;
  c.grid.d = 32;
  c.source.kind = hs::SourceKind::sine_mixture;
  c.source.count = 400;
  c.source.length = 128;
  c.source.components = 2;
  c.source.f_lo = 0.08;
  c.source.cutoff = 0.12;
  c.source.seed = 88;
  c.model.network = {16, 2, {1, 2, 4, 8}};
  c.training = {300, 0.1, 16, 64, 5.0, c.seed};
  c.finetune = {5, 0.02, 16, 64, 5.0, c.seed};
  c.schedule = {1.0, 0.01, 11, 3.3e-5, 100};
  c.model_paths = {dir / "train" / "model.pnfm"};
  c.stack_paths = {dir / "finetune" / "stack.pnfs"};
  return c;
}

struct Restoration {
  hs::MetricReport superres, inpaint;
  double sigma_l = 0.0;
};

// Runs train -> finetune -> superres and inpaint through the harness. Trained
// checkpoints are reused when the echoed config in their directory matches.
Restoration restoration_suite() {
  const auto dir = work_dir() / "restoration";
  auto c = restoration_config(dir);
  const auto step = [&](hs::Task task, const char* sub) {
    auto t = c;
    t.task = task;
    t.out = dir / sub;
    auto doc = hs::to_json(t);
    const auto hash = hs::hash_hex(hs::config_hash(doc));
    const auto echo = t.out / "config.json";
    const auto product = task == hs::Task::train ? t.out / "model.pnfm" : t.out / "stack.pnfs";
    if (fs::exists(product) && fs::exists(echo)) {
      std::ifstream in(echo);
      const auto stored = nlohmann::json::parse(in, nullptr, false);
      if (!stored.is_discarded() && stored.value("config_hash", "") == hash) return;
    }
    hs::run_experiment(t);
  };
  step(hs::Task::train, "train");
  step(hs::Task::finetune, "finetune");

  Restoration out;
  out.sigma_l = c.schedule.sigmaL;
  c.task = hs::Task::superres;
  c.measurement.kind = "decimate";
  c.measurement.ratio = 4;
  c.out = dir / "superres";
  out.superres = hs::run_experiment(c);
  c.task = hs::Task::inpaint;
  c.measurement.kind = "mask";
  c.measurement.gap = 0.25;
  c.out = dir / "inpaint";
  out.inpaint = hs::run_experiment(c);
  return out;
}

Outcome superres_beats_spline() {
  const auto r = restoration_suite();
  std::size_t wins = 0, total = 0;
  std::string per;
  for (const auto& rec : r.superres.records) {
    for (const auto& b : r.superres.baselines) {
      if (b.seed != rec.seed || b.method != "cubic_spline") continue;
      ++total;
      if (*rec.psnr > *b.psnr) ++wins;
      per += fmt(" %.1f/%.1f", *rec.psnr, *b.psnr);
    }
  }
  return {total == 10 && wins >= 8,
          fmt("PnF beats cubic spline on %zu of %zu signals (>= 8); PSNR dB PnF/spline:%s", wins, total,
              per.c_str())};
}

Outcome constraint_satisfaction() {
  const auto r = restoration_suite();
  const double bound = 3.0 * r.sigma_l;
  double worst = 0.0;
  std::size_t ok = 0, total = 0;
  for (const auto* rep : {&r.superres, &r.inpaint}) {
    for (const auto& rec : rep->records) {
      ++total;
      worst = std::max(worst, *rec.constraint_residual);
      if (*rec.constraint_residual <= bound) ++ok;
    }
  }
  return {total == 20 && ok == total,
          fmt("%zu of %zu superres/inpaint runs within 3 sigma_L = %.3f; worst residual %.4f", ok, total,
              bound, worst)};
}

// ------------------------------------------------------------------ 10

Outcome metric_units() {
  double worst = 0.0;
  const auto track = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
  std::vector<double> t(16);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = (i % 2 == 0) ? 2.5 : -2.5;  // energy 100
  track(hs::si_sdr(t, t), hs::kSiSdrCap);
  std::vector<double> e(t);
  for (auto& v : e) v *= 2.0;
  track(hs::si_sdr(e, t), hs::kSiSdrCap);
  e = t;
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += (i % 4 < 2) ? 0.25 : -0.25;  // orthogonal, energy 1
  track(hs::si_sdr(e, t), 20.0);

  const std::vector<double> target{0.3, -0.1, 0.8, 0.0, -0.6};
  track(hs::psnr(target, target, 2.0), hs::kPsnrCap);
  e = target;
  for (auto& v : e) v -= 0.2;
  track(hs::psnr(e, target, 2.0), 20.0);

  Rng rng = make_rng(1010);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a(50), b(50);
    long double se = 0.0L, dot = 0.0L, tt = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      se += static_cast<long double>(a[i] - b[i]) * (a[i] - b[i]);
      dot += static_cast<long double>(a[i]) * b[i];
      tt += static_cast<long double>(b[i]) * b[i];
    }
    track(hs::psnr(a, b, 2.0), static_cast<double>(10.0L * std::log10(4.0L / (se / 50.0L))));
    const long double alpha = dot / tt;
    long double sig = 0.0L, dist = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const long double s = alpha * b[i];
      sig += s * s;
      dist += (s - a[i]) * (s - a[i]);
    }
    track(hs::si_sdr(a, b), static_cast<double>(10.0L * std::log10(sig / dist)));
  }
  return {worst <= 1e-9, fmt("max deviation from closed-form values = %.3g dB (<= 1e-9)", worst)};
}

struct Criterion {
  const char* name;
  Outcome (*run)();
  double budget_s;  // runtime limit, part of the criterion
};

const Criterion kCriteria[] = {
    {"factorization identity", factorization_identity, 30},
    {"gradient correctness", gradient_correctness, 60},
    {"mixing to the prior", mixing_to_prior, 600},
    {"posterior correctness", posterior_correctness, 900},
    {"likelihood trend in T", likelihood_trend, 1800},
    {"block-gradient exactness", block_exactness, 30},
    {"parallel speedup", parallel_speedup, 600},
    {"super-resolution beats spline", superres_beats_spline, 1200},
    {"constraint satisfaction", constraint_satisfaction, 1200},
    {"metric units", metric_units, 1},
};

bool run_one(std::size_t index) {
  const auto& c = kCriteria[index - 1];
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > c.budget_s) {
    o.pass = false;
    o.detail += fmt("; runtime %.1f s exceeds %.0f s", secs, c.budget_s);
  }
  std::printf("criterion %2zu %-30s %s  %s  [%.1f s]\n", index, c.name, o.pass ? "PASS" : "FAIL",
              o.detail.c_str(), secs);
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  constexpr std::size_t count = std::size(kCriteria);
  bool ok = true;
  if (argc < 2) {
    for (std::size_t i = 1; i <= count; ++i) ok = run_one(i) && ok;
    return ok ? 0 : 1;
  }
  for (int a = 1; a < argc; ++a) {
    const long k = std::strtol(argv[a], nullptr, 10);
    if (k < 1 || k > static_cast<long>(count)) {
      std::fprintf(stderr, "usage: %s [criterion 1..%zu]...\n", argv[0], count);
      return 2;
    }
    ok = run_one(static_cast<std::size_t>(k)) && ok;
  }
  return ok ? 0 : 1;
}
