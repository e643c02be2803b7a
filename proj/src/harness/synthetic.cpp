// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/harness/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pnf/checkpoint.hpp"
#include "pnf/error.hpp"

namespace pnf::harness {
namespace {

// Stream tags so the three generators never share random numbers.
constexpr std::uint64_t kTabularTag = 0x7461;
constexpr std::uint64_t kSineTag = 0x7369;
constexpr std::uint64_t kBurstTag = 0x6275;

std::vector<double> sine_mixture(const SourceConfig& c, Rng& rng) {
  std::uniform_real_distribution<double> freq(c.f_lo, c.cutoff);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> amp(0.5, 1.0);
  std::vector<double> x(c.length, 0.0);
  for (std::size_t k = 0; k < c.components; ++k) {
    const double f = freq(rng), p = phase(rng), a = amp(rng);
    for (std::size_t t = 0; t < c.length; ++t) {
      x[t] += a * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(t) + p);
    }
  }
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : x) v *= c.amplitude / peak;
  }
  return x;
}

std::vector<double> bursty_noise(const SourceConfig& c, const DiscretizationGrid& grid, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution burst(c.burst_prob);
  std::vector<double> x(c.length);
  double prev = 0.0;
  for (std::size_t t = 0; t < c.length; ++t) {
    double v = c.ar * prev + c.background * normal(rng);
    if (burst(rng)) v += c.burst_scale * normal(rng);
    prev = std::clamp(v, grid.lo(), grid.hi());
    x[t] = prev;
  }
  return x;
}

void validate(const SourceConfig& c) {
  if (c.length == 0) throw ConfigError("source length must be positive");
  switch (c.kind) {
    case SourceKind::ar_tabular:
      break;
    case SourceKind::sine_mixture:
      if (c.components == 0) throw ConfigError("sine_mixture needs at least one component");
      if (!(c.f_lo >= 0.0 && c.f_lo < c.cutoff && c.cutoff <= 0.5)) {
        throw ConfigError("sine_mixture needs 0 <= f_lo < cutoff <= 0.5");
      }
      if (!(c.amplitude > 0.0)) throw ConfigError("sine_mixture amplitude must be positive");
      break;
    case SourceKind::bursty_noise:
      if (!(c.burst_prob >= 0.0 && c.burst_prob <= 1.0)) {
        throw ConfigError("bursty_noise burst_prob must lie in [0, 1]");
      }
      if (!(std::abs(c.ar) < 1.0)) throw ConfigError("bursty_noise needs |ar| < 1");
      break;
  }
}

}  // namespace

SourceKind parse_source_kind(const std::string& name) {
  if (name == "ar_tabular") return SourceKind::ar_tabular;
  if (name == "sine_mixture") return SourceKind::sine_mixture;
  if (name == "bursty_noise") return SourceKind::bursty_noise;
  throw ConfigError("unknown source kind '" + name + "'");
}

const char* source_kind_name(SourceKind kind) noexcept {
  switch (kind) {
    case SourceKind::ar_tabular:
      return "ar_tabular";
    case SourceKind::sine_mixture:
      return "sine_mixture";
    case SourceKind::bursty_noise:
      return "bursty_noise";
  }
  return "?";
}

TabularMarkovModel source_table(const SourceConfig& config, const DiscretizationGrid& grid) {
  if (config.table.empty()) {
    try {
      return TabularMarkovModel::random_walk(grid, config.rho, config.spread);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("ar_tabular source: ") + e.what());
    }
  }
  const auto model = load_model(config.table);
  const auto* tab = dynamic_cast<const TabularMarkovModel*>(model.get());
  if (tab == nullptr) throw ConfigError(config.table.string() + " is not a tabular model");
  if (!(tab->grid() == grid)) throw ConfigError(config.table.string() + " uses a different grid");
  return *tab;
}

Corpus sample_corpus(const TabularMarkovModel& model, std::size_t length, std::size_t count,
                     std::uint64_t seed) {
  const std::size_t d = model.grid().size();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Corpus corpus(count);
  for (std::size_t s = 0; s < count; ++s) {
    Rng rng = make_rng(seed, {kTabularTag, s});
    auto& seq = corpus[s];
    seq.resize(length);
    std::size_t row = model.initial_row();
    for (std::size_t i = 0; i < length; ++i) {
      const auto p = model.row(row);
      double u = uniform(rng);
      std::size_t k = 0;
      // Inverse CDF; the last bin with positive mass absorbs rounding.
      std::size_t last = 0;
      for (; k < d; ++k) {
        if (p[k] > 0.0) last = k;
        if (u < p[k]) break;
        u -= p[k];
      }
      if (k == d) k = last;
      seq[i] = static_cast<std::uint32_t>(k);
      row = model.next_row(row, k);
    }
  }
  return corpus;
}

std::vector<std::vector<double>> synthetic_signals(const SourceConfig& config,
                                                   const DiscretizationGrid& grid) {
  validate(config);
  std::vector<std::vector<double>> out;
  out.reserve(config.count);
  if (config.kind == SourceKind::ar_tabular) {
    for (const auto& bins : synthetic_corpus(config, grid)) out.push_back(grid.to_values(bins));
    return out;
  }
  for (std::size_t s = 0; s < config.count; ++s) {
    Rng rng = make_rng(config.seed,
                       {config.kind == SourceKind::sine_mixture ? kSineTag : kBurstTag, s});
    const auto x = config.kind == SourceKind::sine_mixture ? sine_mixture(config, rng)
                                                           : bursty_noise(config, grid, rng);
    out.push_back(grid.snap(x));
  }
  return out;
}

Corpus synthetic_corpus(const SourceConfig& config, const DiscretizationGrid& grid) {
  validate(config);
  if (config.kind == SourceKind::ar_tabular) {
    return sample_corpus(source_table(config, grid), config.length, config.count, config.seed);
  }
  Corpus corpus;
  for (const auto& x : synthetic_signals(config, grid)) corpus.push_back(grid.quantize(x));
  return corpus;
}

}  // namespace pnf::harness
