// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pnf/conv_net.hpp"
#include "pnf/error.hpp"
#include "pnf/noisy_tabular.hpp"
#include "pnf/oracle.hpp"
#include "pnf/smoothing.hpp"
#include "pnf/tabular.hpp"

using namespace pnf;

namespace {

// Mixture density sum_k softmax(f)_k phi_sigma(xi - e_k) in long double.
long double mixture_density(std::span<const double> f, std::span<const double> e, long double xi,
                            long double sigma) {
  long double z = 0, m = -1e300L;
  for (double v : f) m = std::max<long double>(m, v);
  for (double v : f) z += std::exp(static_cast<long double>(v) - m);
  long double p = 0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const long double w = std::exp(static_cast<long double>(f[k]) - m) / z;
    const long double diff = xi - e[k];
    p += w * std::exp(-diff * diff / (2 * sigma * sigma)) /
         std::sqrt(2 * std::numbers::pi_v<long double> * sigma * sigma);
  }
  return p;
}

double rel_error(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

std::vector<double> fd_score(const ConditionalModel& model, std::vector<double> x, double sigma,
                             double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double keep = x[j];
    x[j] = keep + h;
    const double a = sequence_score(model, x, sigma).log_density;
    x[j] = keep - h;
    const double b = sequence_score(model, x, sigma).log_density;
    x[j] = keep;
    g[j] = (a - b) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("single spike is a Gaussian") {
  const auto grid = DiscretizationGrid::from_values({0.25});
  const std::vector<double> f{3.7};
  const double sigma = 0.4, xi = -0.3;
  const auto r = log_smoothed_conditional(f, xi, sigma, grid);
  const double expected = -(xi - 0.25) * (xi - 0.25) / (2 * sigma * sigma) -
                          0.5 * std::log(2 * std::numbers::pi * sigma * sigma);
  CHECK(r.log_density == doctest::Approx(expected).epsilon(1e-14));
  CHECK(r.grad_xi == doctest::Approx((0.25 - xi) / (sigma * sigma)).epsilon(1e-14));
  CHECK(std::abs(r.logit_grad[0]) < 1e-15);
}

TEST_CASE("symmetric two-spike configuration has zero gradients") {
  const auto grid = DiscretizationGrid::from_values({-1.0, 1.0});
  const std::vector<double> f{0.4, 0.4};
  const auto r = log_smoothed_conditional(f, 0.0, 0.7, grid);
  CHECK(r.grad_xi == 0.0);
  CHECK(r.logit_grad[0] == 0.0);
  CHECK(r.logit_grad[1] == 0.0);
}

TEST_CASE("three-spike values match the extended-precision mixture") {
  const auto grid = DiscretizationGrid::from_values({-1.0, 0.0, 1.0});
  const std::vector<double> f{0.3, -0.2, 0.1};
  const double sigma = 0.5, xi = 0.4;
  const auto r = log_smoothed_conditional(f, xi, sigma, grid);
  const long double p = mixture_density(f, grid.values(), xi, sigma);
  CHECK(std::abs(r.log_density - static_cast<double>(std::log(p))) < 1e-8);
  const long double h = 1e-6L;
  const long double fd = (std::log(mixture_density(f, grid.values(), xi + h, sigma)) -
                          std::log(mixture_density(f, grid.values(), xi - h, sigma))) /
                         (2 * h);
  CHECK(std::abs(r.grad_xi - static_cast<double>(fd)) < 1e-8);
  double sum = 0.0;
  for (double g : r.logit_grad) sum += g;
  CHECK(std::abs(sum) < 1e-10);
  // d/df_k by central differences.
  for (std::size_t k = 0; k < 3; ++k) {
    auto fp = f, fm = f;
    fp[k] += 1e-6;
    fm[k] -= 1e-6;
    const double d = (log_smoothed_conditional(fp, xi, sigma, grid).log_density -
                      log_smoothed_conditional(fm, xi, sigma, grid).log_density) /
                     2e-6;
    CHECK(std::abs(r.logit_grad[k] - d) < 1e-8);
  }
}

TEST_CASE("smoothed conditional integrates to one") {
  Rng rng = make_rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t d : {1UL, 2UL, 3UL}) {
    const auto grid = DiscretizationGrid::linear(d, -1, 1);
    for (double sigma : {0.15, 0.5, 1.3}) {
      std::vector<double> f(d);
      for (double& v : f) v = normal(rng);
      const double lo = grid.lo() - 8 * sigma, hi = grid.hi() + 8 * sigma;
      const int steps = 20000;  // Simpson
      const double h = (hi - lo) / steps;
      double s = 0.0;
      for (int i = 0; i <= steps; ++i) {
        const double w = (i == 0 || i == steps) ? 1 : (i % 2 ? 4 : 2);
        s += w * std::exp(log_smoothed_conditional(f, lo + i * h, sigma, grid).log_density);
      }
      CHECK(std::abs(s * h / 3 - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("argument validation") {
  const auto grid = DiscretizationGrid::linear(2, -1, 1);
  const std::vector<double> f{0.0, 0.0};
  CHECK_THROWS_AS(log_smoothed_conditional(f, 0.0, 0.0, grid), InvalidArgument);
  CHECK_THROWS_AS(log_smoothed_conditional(f, 0.0, -1.0, grid), InvalidArgument);
  CHECK_THROWS_AS(log_smoothed_conditional({}, 0.0, 1.0, grid), InvalidArgument);
  const auto tab = TabularMarkovModel::uniform(grid, 1);
  std::vector<double> x{0.1, std::nan("")};
  CHECK_THROWS_AS(sequence_score(tab, x, 0.5), InvalidSample);
  std::vector<double> g(3);
  CHECK_THROWS_AS(partial_score(tab, std::vector<double>{0.0, 1.0}, 0.5, 0, 2, 0, 2, g),
                  InvalidArgument);
}

TEST_CASE("sequence score of length one is the initial conditional") {
  Rng rng = make_rng(4);
  const auto tab = TabularMarkovModel::random(DiscretizationGrid::linear(3, -1, 1), 1, rng);
  const std::vector<double> x{0.37};
  const auto s = sequence_score(tab, x, 0.6);
  const auto r = log_smoothed_conditional(tab.logits({}), 0.37, 0.6, tab.grid());
  CHECK(s.log_density == r.log_density);
  CHECK(s.score[0] == r.grad_xi);
}

TEST_CASE("tabular score has only direct terms") {
  Rng rng = make_rng(5);
  const auto tab = TabularMarkovModel::random(DiscretizationGrid::linear(3, -1, 1), 2, rng);
  const std::vector<double> x{0.3, -0.9, 0.2, 0.8, -0.1};
  const auto s = sequence_score(tab, x, 0.4);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = log_smoothed_conditional(tab.logits(std::span<const double>(x).first(i)), x[i],
                                            0.4, tab.grid());
    CHECK(s.score[i] == r.grad_xi);
  }
}

TEST_CASE("exact Bayes conditionals reproduce the smoothed joint") {
  const auto grid = DiscretizationGrid::linear(2, -1, 1);
  Rng rng = make_rng(6);
  const auto tab = TabularMarkovModel::random(grid, 1, rng);
  const ExactNoisyMarkovModel noisy(tab, 0.8);
  const std::vector<double> x{0.2, -1.3, 0.7, 0.05};
  const auto s = sequence_score(noisy, x, 0.8);
  const auto exact = oracle::exact_log_density(tab, x, 0.8);
  CHECK(std::abs(s.log_density - exact.log_density) < 1e-8);
  CHECK(rel_error(s.score, exact.score) < 1e-8);
}

TEST_CASE("sequence score matches finite differences") {
  SUBCASE("neural") {
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
      CausalConvNet net(DiscretizationGrid::linear(6, -1, 1), {6, 2, {1, 2, 4}});
      Rng rng = make_rng(70 + trial);
      std::normal_distribution<double> normal(0.0, 0.4);
      for (double& p : net.params()) p = normal(rng);
      std::vector<double> x(20);
      for (double& v : x) v = normal(rng) * 2;
      const auto s = sequence_score(net, x, 0.3);
      CHECK(rel_error(s.score, fd_score(net, x, 0.3)) < 1e-4);
    }
  }
  SUBCASE("exact noisy chain") {
    Rng rng = make_rng(80);
    const auto tab = TabularMarkovModel::random(DiscretizationGrid::linear(3, -1, 1), 2, rng);
    const ExactNoisyMarkovModel noisy(tab, 0.45, 4);
    std::normal_distribution<double> normal(0.0, 0.8);
    std::vector<double> x(9);
    for (double& v : x) v = normal(rng);
    const auto s = sequence_score(noisy, x, 0.45);
    CHECK(rel_error(s.score, fd_score(noisy, x, 0.45)) < 1e-6);
  }
}

TEST_CASE("unnormalized smoothed density of a grid sequence decreases to the Dirac limit") {
  const auto grid = DiscretizationGrid::linear(2, -1, 1);
  Rng rng = make_rng(9);
  const auto tab = TabularMarkovModel::random(grid, 1, rng);
  const std::vector<std::uint32_t> bins{0, 1, 1, 0};
  const auto x = grid.to_values(bins);
  const double logp = tab.log_prob(bins);
  double prev = 1e300;
  for (double sigma : {1.0, 0.5, 0.25, 0.1, 0.05}) {
    const double ld = oracle::exact_log_density(tab, x, sigma).log_density;
    const double shifted = ld - 4 * gaussian_log_normalizer(sigma);
    // log sum_x' p(x') exp(-|x - x'|^2 / 2 sigma^2) shrinks to the x' = x term.
    CHECK(shifted <= prev);
    CHECK(shifted >= logp - 1e-12);
    prev = shifted;
  }
  CHECK(std::abs(prev - logp) < 1e-6);
}
