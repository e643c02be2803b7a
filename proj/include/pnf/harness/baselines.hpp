// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pnf/measure.hpp"

namespace pnf::harness {

enum class Interpolation { linear, cubic_spline };

const char* interpolation_name(Interpolation method) noexcept;

/// Reconstructs a length-n signal from samples at strictly increasing
/// `positions`. Natural cubic spline or piecewise linear inside the known
/// range; outside it the nearest known value is held. Fewer than three
/// points fall back to linear, a single point to a constant.
std::vector<double> interpolate(std::span<const std::size_t> positions,
                                std::span<const double> values, std::size_t n,
                                Interpolation method);

/// Baseline reconstruction from a decimate or mask observation.
std::vector<double> interpolation_baseline(const MeasurementModel& mm, std::span<const double> y,
                                           Interpolation method);

}  // namespace pnf::harness
