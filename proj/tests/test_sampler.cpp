// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "pnf/error.hpp"
#include "pnf/noisy_tabular.hpp"
#include "pnf/oracle.hpp"
#include "pnf/sampler.hpp"

using namespace pnf;

namespace {

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

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

TEST_CASE("schedule construction") {
  const auto s = make_schedule(175.9, 0.15, 15, 0.05, 256);
  CHECK(s.levels() == 15);
  CHECK(s.sigmas.front() == 175.9);
  CHECK(s.sigmas.back() == 0.15);
  const long double expected = 175.9L * std::pow(0.15L / 175.9L, 1.0L / 14.0L);
  CHECK(std::abs(s.sigmas[1] - static_cast<double>(expected)) < 1e-10);
  for (std::size_t i = 1; i < s.levels(); ++i) {
    CHECK(s.sigmas[i] < s.sigmas[i - 1]);
    // Geometric: constant ratio.
    CHECK(s.sigmas[i] / s.sigmas[i - 1] == doctest::Approx(s.sigmas[1] / s.sigmas[0]).epsilon(1e-12));
  }
  CHECK(s.eta(14) == 0.05);
  CHECK(s.eta(0) == doctest::Approx(0.05 * (175.9 / 0.15) * (175.9 / 0.15)).epsilon(1e-14));
  const auto img = make_schedule(1.0, 0.01, 19, 0.05, 10);
  CHECK(img.sigmas[9] == doctest::Approx(0.1).epsilon(1e-14));

  CHECK_THROWS_AS(make_schedule(0.1, 0.2, 5, 0.05, 1), InvalidArgument);
  CHECK_THROWS_AS(make_schedule(1.0, 0.0, 5, 0.05, 1), InvalidArgument);
  CHECK_THROWS_AS(make_schedule(1.0, 0.1, 1, 0.05, 1), InvalidArgument);
  CHECK_THROWS_AS(make_schedule(1.0, 0.1, 5, 0.0, 1), InvalidArgument);
  CHECK_THROWS_AS(make_schedule(1.0, 0.1, 5, 0.05, 0), InvalidArgument);
}

TEST_CASE("pure diffusion step and its scaling law") {
  const std::vector<double> start{0.5, -1.0, 2.0};
  const std::vector<double> eps{0.3, -0.7, 1.1};
  const std::vector<double> zero(3, 0.0);
  SequenceBuffer a(start);
  langevin_step(a, zero, {}, 0.08, eps);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.data()[i] == start[i] + std::sqrt(0.16) * eps[i]);

  SequenceBuffer b(start);
  langevin_step(b, zero, {}, 0.02, eps);
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    na += std::pow(a.data()[i] - start[i], 2);
    nb += std::pow(b.data()[i] - start[i], 2);
  }
  CHECK(std::abs(std::sqrt(na / nb) - 2.0) < 1e-12);

  SequenceBuffer c(start);
  const std::vector<double> score{1.0, 2.0, 3.0}, lik{-0.5, 0.0, 0.5};
  langevin_step(c, score, lik, 0.1, zero);
  CHECK(c.data()[0] == doctest::Approx(0.55));
  CHECK(c.data()[2] == doctest::Approx(2.35));
}

TEST_CASE("step errors") {
  SequenceBuffer x(std::vector<double>{0.0, 0.0});
  const std::vector<double> ok{0.0, 0.0};
  const std::vector<double> bad{0.0, std::nan("")};
  try {
    langevin_step(x, bad, {}, 0.1, ok, 3, 7);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.level() == 3);
    CHECK(e.step() == 7);
  }
  const std::vector<double> huge{1e308, 0.0};
  CHECK_THROWS_AS(langevin_step(x, huge, {}, 10.0, ok), DivergenceError);
  CHECK_THROWS_AS(langevin_step(x, ok, {}, 0.0, ok), InvalidArgument);
  CHECK_THROWS_AS(langevin_step(x, std::vector<double>{0.0}, {}, 0.1, ok), InvalidArgument);
}

TEST_CASE("quadratic potential reaches the discretized stationary variance") {
  const double tau = 1.0, eta = 0.01;
  SequenceBuffer x(std::vector<double>{0.0});
  Rng rng = make_rng(31);
  std::vector<double> score(1);
  const std::size_t burn = 5000, steps = 1000000;
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t t = 0; t < burn + steps; ++t) {
    score[0] = -x.data()[0] / (tau * tau);
    langevin_step(x, score, {}, eta, rng);
    if (t >= burn) {
      s1 += x.data()[0];
      s2 += x.data()[0] * x.data()[0];
    }
  }
  const double mean = s1 / steps;
  const double var = s2 / steps - mean * mean;
  // x' = (1 - eta/tau^2) x + sqrt(2 eta) eps has variance tau^2 / (1 - eta / (2 tau^2)).
  const double exact = tau * tau / (1.0 - eta / (2 * tau * tau));
  CHECK(std::abs(var / exact - 1.0) < 0.05);
}

TEST_CASE("stack and schedule must agree") {
  const auto grid = DiscretizationGrid::from_values({-1.0, 1.0});
  const auto tab = TabularMarkovModel::uniform(grid, 1);
  const auto s = make_schedule(2.0, 0.1, 4, 1e-4, 2);
  const auto stack = exact_stack(tab, s);
  auto other = s;
  other.sigmas[1] *= 1.0000001;
  Rng rng = make_rng(1);
  CHECK_THROWS_AS(run_pnf(stack, nullptr, {}, other, 4, rng), ConfigError);
  const auto mm = MeasurementModel::mask({1, 1, 1});
  CHECK_THROWS_AS(run_pnf(stack, &mm, std::vector<double>{1, 1, 1}, s, 4, rng), InvalidArgument);
}

TEST_CASE("runs are deterministic under a seed") {
  Rng gen = make_rng(32);
  const auto tab = TabularMarkovModel::random(DiscretizationGrid::linear(3, -1, 1), 1, gen);
  const auto s = make_schedule(3.0, 0.05, 6, 0.05 * 0.05 * 0.05, 20);
  const auto stack = exact_stack(tab, s);
  Rng a = make_rng(99), b = make_rng(99), c = make_rng(100);
  const auto xa = run_pnf(stack, nullptr, {}, s, 12, a);
  const auto xb = run_pnf(stack, nullptr, {}, s, 12, b);
  const auto xc = run_pnf(stack, nullptr, {}, s, 12, c);
  CHECK(xa == xb);
  CHECK(xa != xc);
}

TEST_CASE("fully observed sequences collapse onto the observation") {
  Rng gen = make_rng(33);
  const auto grid = DiscretizationGrid::linear(4, -1, 1);
  const auto tab = TabularMarkovModel::random(grid, 1, gen);
  const auto s = make_schedule(3.0, 0.05, 8, 0.05 * 0.05 * 0.05, 60);
  const auto stack = exact_stack(tab, s);
  const std::vector<std::uint32_t> bins{0, 3, 1, 1, 2, 0, 3, 2};
  const auto y = grid.to_values(bins);
  const auto mm = MeasurementModel::mask(std::vector<std::uint8_t>(bins.size(), 1));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng = make_rng(seed);
    const auto x = run_pnf(stack, &mm, y, s, bins.size(), rng);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x[i] - y[i]) < 3 * 0.05);
  }
}

TEST_CASE("unconditional samples match the exact distribution") {
  Rng gen = make_rng(34);
  const auto grid = DiscretizationGrid::from_values({-1.0, 1.0});
  const auto tab = TabularMarkovModel::random(grid, 1, gen);
  const auto s = make_schedule(3.0, 0.1, 10, 0.05 * 0.1 * 0.1, 100);
  const auto stack = exact_stack(tab, s);
  const std::size_t n = 4, runs = 1000;
  std::vector<double> hist(16, 0.0);
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng = make_rng(1000 + r);
    const auto x = run_pnf(stack, nullptr, {}, s, n, rng);
    hist[encode(grid.quantize(x), 2)] += 1.0 / runs;
  }
  const double tv = oracle::total_variation(hist, oracle::exact_distribution(tab, n));
  MESSAGE("unconditional TV = " << tv);
  CHECK(tv < 0.1);
}

TEST_CASE("two-source separation matches the exact posterior") {
  Rng gen = make_rng(35);
  const auto grid = DiscretizationGrid::from_values({-1.0, 1.0});
  const auto t1 = TabularMarkovModel::random(grid, 1, gen);
  const auto t2 = TabularMarkovModel::random(grid, 1, gen);
  // Mode switching between sign-flipped sources happens at mid levels and needs
  // a slower schedule than the unconditional case.
  const auto s = make_schedule(3.0, 0.1, 10, 0.2 * 0.1 * 0.1, 400);
  const auto s1 = exact_stack(t1, s), s2 = exact_stack(t2, s);
  const std::size_t n = 3, runs = 2000;
  const auto mm = MeasurementModel::mix({1.0, 1.0}, n);
  const std::vector<double> truth{1, -1, -1, -1, -1, 1};
  const auto y = mm.apply(truth);
  PnfProblem p;
  p.stacks = {&s1, &s2};
  p.measurement = &mm;
  p.y = y;
  p.n = n;
  std::vector<double> hist(64, 0.0);
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng = make_rng(5000 + r);
    const auto x = run_pnf(p, s, rng);
    hist[encode(grid.quantize(x), 2)] += 1.0 / runs;
  }
  const TabularMarkovModel* sources[] = {&t1, &t2};
  const auto exact = oracle::exact_posterior(sources, mm, y, s.sigmas.back());
  const double tv = oracle::total_variation(hist, exact);
  MESSAGE("separation TV = " << tv);
  CHECK(tv < 0.15);
}

TEST_CASE("annealing properties on a random-walk chain") {
  const auto grid = DiscretizationGrid::linear(8, -1, 1);
  const auto tab = TabularMarkovModel::random_walk(grid, 0.9, 0.15);
  const std::size_t n = 24;

  SUBCASE("median log-likelihood rises across levels") {
    const auto s = make_schedule(3.0, 0.02, 8, 0.05 * 0.02 * 0.02, 64);
    const auto stack = exact_stack(tab, s);
    std::vector<std::vector<double>> ll(s.levels());
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng = make_rng(seed);
      run_pnf(stack, nullptr, {}, s, n, rng, [&](std::size_t level, std::span<const double> x) {
        ll[level].push_back(tab.log_prob(grid.quantize(x)));
      });
    }
    int inversions = 0;
    for (std::size_t l = 1; l < s.levels(); ++l) inversions += median(ll[l]) < median(ll[l - 1]);
    CHECK(inversions <= 1);
  }

  SUBCASE("more steps per level give higher likelihood") {
    std::vector<double> medians;
    for (std::size_t steps : {16UL, 64UL, 256UL}) {
      const auto s = make_schedule(3.0, 0.02, 8, 0.05 * 0.02 * 0.02, steps);
      const auto stack = exact_stack(tab, s);
      std::vector<double> ll;
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng = make_rng(200 + seed);
        ll.push_back(tab.log_prob(grid.quantize(run_pnf(stack, nullptr, {}, s, n, rng))));
      }
      medians.push_back(median(ll));
    }
    MESSAGE("medians " << medians[0] << " " << medians[1] << " " << medians[2]);
    CHECK(medians[1] >= medians[0]);
    CHECK(medians[2] >= medians[1]);
  }

  SUBCASE("conditioned runs do not regress the constraint") {
    const auto s = make_schedule(3.0, 0.02, 8, 0.05 * 0.02 * 0.02, 64);
    const auto stack = exact_stack(tab, s);
    const auto mm = MeasurementModel::decimate(3, n);
    std::vector<double> truth(n);
    {
      Rng anc = make_rng(37);
      std::vector<std::uint32_t> bins{3};
      while (bins.size() < n) {
        const auto row = tab.row(tab.next_row(tab.initial_row(), bins.back()));
        bins.push_back(static_cast<std::uint32_t>(
            std::discrete_distribution<std::uint32_t>(row.begin(), row.end())(anc)));
      }
      truth = grid.to_values(bins);
    }
    const auto y = mm.apply(truth);
    int good = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng = make_rng(300 + seed);
      double mid = 0.0, last = 0.0;
      run_pnf(stack, &mm, y, s, n, rng, [&](std::size_t level, std::span<const double> x) {
        const auto ax = mm.apply(x);
        double worst = 0.0;
        for (std::size_t i = 0; i < ax.size(); ++i) worst = std::max(worst, std::abs(ax[i] - y[i]));
        if (level + 1 == (s.levels() + 1) / 2) mid = worst;
        if (level + 1 == s.levels()) last = worst;
      });
      good += last <= mid;
    }
    CHECK(good >= 9);
  }
}
