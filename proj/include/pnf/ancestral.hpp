// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pnf/model.hpp"
#include "pnf/random.hpp"

namespace pnf {

/// Draws x_0, x_1, ... left to right from softmax(logits(x_{<i})).
std::vector<std::uint32_t> ancestral_sample(const ConditionalModel& model, std::size_t n, Rng& rng);

}  // namespace pnf
