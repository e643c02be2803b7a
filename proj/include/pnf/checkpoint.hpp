// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>

#include "pnf/model.hpp"

// Model checkpoints: "PNFM", u32 version, grid block, architecture descriptor
// (u32 model kind, u32 count, u32 dims...), then little-endian f32 parameters.
//
//   kind 0  causal conv net   count = layers, dims = (in, out, kernel, dilation) per layer
//   kind 1  tabular chain     count = 1, dims = (order); params = table
//   kind 2  exact noisy chain count = 2, dims = (order, window); params = (sigma, table)
namespace pnf {

enum class ModelKind : std::uint32_t { conv_net = 0, tabular = 1, exact_noisy = 2 };

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_model(std::ostream& out, const ConditionalModel& model);
void save_model(const std::filesystem::path& path, const ConditionalModel& model);

/// `sigma_override` > 0 replaces the stored noise level of an exact noisy
/// chain (used by stacks, whose header keeps sigma in double precision).
std::unique_ptr<ConditionalModel> load_model(std::istream& in, double sigma_override = 0.0);
std::unique_ptr<ConditionalModel> load_model(const std::filesystem::path& path);

/// Advances `in` past one model block without building the model.
void skip_model(std::istream& in);

}  // namespace pnf
