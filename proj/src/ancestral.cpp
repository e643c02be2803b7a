// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/ancestral.hpp"

#include <algorithm>

#include "pnf/error.hpp"

namespace pnf {

std::vector<std::uint32_t> ancestral_sample(const ConditionalModel& model, std::size_t n,
                                            Rng& rng) {
  if (n == 0) throw InvalidArgument("sample length must be positive");
  const auto& grid = model.grid();
  const std::size_t w = model.window();
  std::vector<std::uint32_t> bins;
  std::vector<double> values;
  std::vector<double> prob(grid.size());
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  bins.reserve(n);
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t from = i > w ? i - w : 0;
    const auto logits = model.logits(std::span<const double>(values).subspan(from));
    softmax(logits, prob);
    const double u = uniform(rng);
    double acc = 0.0;
    std::size_t k = 0;
    for (; k + 1 < prob.size(); ++k) {
      acc += prob[k];
      if (u < acc) break;
    }
    bins.push_back(static_cast<std::uint32_t>(k));
    values.push_back(grid[k]);
  }
  return bins;
}

}  // namespace pnf
