// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pnf/error.hpp"
#include "pnf/model.hpp"
#include "pnf/smoothing.hpp"

namespace pnf::oracle {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
}

double log_phi(double diff, double sigma) {
  return -0.5 * diff * diff / (sigma * sigma) + gaussian_log_normalizer(sigma);
}

// Normalizes exp(logw) in place; returns the log normalizer.
double normalize_log_weights(std::vector<double>& logw) {
  const double z = log_sum_exp(logw);
  if (!std::isfinite(z)) throw InvalidArgument("distribution has no mass");
  for (double& v : logw) v = std::exp(v - z);
  return z;
}

}  // namespace

std::uint64_t configuration_count(std::size_t d, std::size_t n) {
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    count *= d;
    if (count > kBudget) throw BudgetExceeded("enumeration exceeds 2^20 configurations");
  }
  return count;
}

std::vector<std::uint32_t> decode(std::uint64_t index, std::size_t d, std::size_t n) {
  std::vector<std::uint32_t> digits(n);
  for (std::size_t i = n; i-- > 0;) {
    digits[i] = static_cast<std::uint32_t>(index % d);
    index /= d;
  }
  return digits;
}

std::vector<double> exact_distribution(const TabularMarkovModel& model, std::size_t n) {
  const std::size_t d = model.grid().size();
  const auto count = configuration_count(d, n);
  std::vector<double> p(count);
  for (std::uint64_t c = 0; c < count; ++c) p[c] = std::exp(model.log_prob(decode(c, d, n)));
  return p;
}

ExactDensity exact_log_density(const TabularMarkovModel& model, std::span<const double> x_tilde,
                               double sigma) {
  check_sigma(sigma);
  require_finite(x_tilde, "x_tilde");
  const auto& grid = model.grid();
  const std::size_t d = grid.size();
  const std::size_t n = x_tilde.size();
  const auto count = configuration_count(d, n);
  std::vector<double> logw(count);
  for (std::uint64_t c = 0; c < count; ++c) {
    const auto bins = decode(c, d, n);
    double lw = model.log_prob(bins);
    if (lw != kNegInf) {
      for (std::size_t i = 0; i < n; ++i) lw += log_phi(x_tilde[i] - grid[bins[i]], sigma);
    }
    logw[c] = lw;
  }
  ExactDensity r;
  r.log_density = normalize_log_weights(logw);
  r.score.assign(n, 0.0);
  for (std::uint64_t c = 0; c < count; ++c) {
    if (logw[c] == 0.0) continue;
    const auto bins = decode(c, d, n);
    for (std::size_t i = 0; i < n; ++i) {
      r.score[i] += logw[c] * (grid[bins[i]] - x_tilde[i]) / (sigma * sigma);
    }
  }
  return r;
}

std::vector<double> exact_noisy_conditional(const TabularMarkovModel& model,
                                            std::span<const double> prefix, double sigma) {
  check_sigma(sigma);
  require_finite(prefix, "prefix");
  const auto& grid = model.grid();
  const std::size_t d = grid.size();
  const std::size_t m = prefix.size();
  const auto count = configuration_count(d, m);
  // Joint log weight of (x_{<i} = c, x_i = k) for every c, k.
  std::vector<double> logw(count * d);
  for (std::uint64_t c = 0; c < count; ++c) {
    const auto bins = decode(c, d, m);
    double lw = model.log_prob(bins);
    if (lw != kNegInf) {
      for (std::size_t j = 0; j < m; ++j) lw += log_phi(prefix[j] - grid[bins[j]], sigma);
    }
    const auto row = model.row(model.context_row(bins));
    for (std::size_t k = 0; k < d; ++k) {
      logw[c * d + k] = (lw == kNegInf || row[k] <= 0.0) ? kNegInf : lw + std::log(row[k]);
    }
  }
  std::vector<double> out(d);
  std::vector<double> column(count);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::uint64_t c = 0; c < count; ++c) column[c] = logw[c * d + k];
    out[k] = log_sum_exp(column);
  }
  normalize_log_weights(out);
  return out;
}

std::vector<double> exact_posterior(std::span<const TabularMarkovModel* const> sources,
                                    const MeasurementModel& mm, std::span<const double> y,
                                    double sigma) {
  check_sigma(sigma);
  if (sources.empty()) throw InvalidArgument("at least one source model is required");
  const std::size_t n = mm.source_length();
  if (mm.n_in() != n * sources.size()) {
    throw InvalidArgument("measurement does not match the number of sources");
  }
  const std::size_t d = sources.front()->grid().size();
  const auto per_source = configuration_count(d, n);
  const auto count = configuration_count(d, n * sources.size());

  std::vector<double> logw(count);
  std::vector<double> x(mm.n_in());
  bool reachable = false;
  for (std::uint64_t c = 0; c < count; ++c) {
    double lw = 0.0;
    std::uint64_t rest = c;
    for (std::size_t s = sources.size(); s-- > 0;) {
      const auto bins = decode(rest % per_source, d, n);
      rest /= per_source;
      lw += sources[s]->log_prob(bins);
      for (std::size_t i = 0; i < n; ++i) x[s * n + i] = sources[s]->grid()[bins[i]];
    }
    const auto pred = mm.apply(x);
    double worst = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) worst = std::max(worst, std::abs(pred[i] - y[i]));
    if (worst <= 10.0 * sigma) reachable = true;
    if (lw != kNegInf) lw += mm.smoothed_likelihood_grad(x, y, sigma).log_likelihood;
    logw[c] = lw;
  }
  if (!reachable) throw UnreachableObservation("no configuration explains the observation");
  normalize_log_weights(logw);
  return logw;
}

std::vector<double> quantized_smoothed_distribution(const TabularMarkovModel& model, std::size_t n,
                                                    double sigma) {
  check_sigma(sigma);
  const auto& grid = model.grid();
  const std::size_t d = grid.size();
  // mass[a * d + b]: probability that e_a + sigma eps quantizes to bin b.
  std::vector<double> mass(d * d);
  const auto cdf = [&](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      // Ties go to the smaller index, which only affects a null set.
      const double lo = b == 0 ? -std::numeric_limits<double>::infinity()
                               : 0.5 * (grid[b - 1] + grid[b]);
      const double hi = b + 1 == d ? std::numeric_limits<double>::infinity()
                                   : 0.5 * (grid[b] + grid[b + 1]);
      mass[a * d + b] = cdf((hi - grid[a]) / sigma) - cdf((lo - grid[a]) / sigma);
    }
  }
  const auto p = exact_distribution(model, n);
  std::vector<double> q(p.size(), 0.0);
  for (std::uint64_t src = 0; src < p.size(); ++src) {
    if (p[src] == 0.0) continue;
    const auto a = decode(src, d, n);
    for (std::uint64_t dst = 0; dst < p.size(); ++dst) {
      const auto b = decode(dst, d, n);
      double w = p[src];
      for (std::size_t i = 0; i < n && w > 0.0; ++i) w *= mass[a[i] * d + b[i]];
      q[dst] += w;
    }
  }
  return q;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("distributions differ in size");
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return 0.5 * tv;
}

}  // namespace pnf::oracle
