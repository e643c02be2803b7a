// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include <json.hpp>

namespace pnf::harness {

/// Raw sample files: little-endian float32, sequences back to back, no header.
/// A sidecar `<file>.json` records n, count and whatever the caller adds
/// (grid, task, seed, config hash).
struct SampleSet {
  std::size_t n = 0;
  std::vector<std::vector<double>> sequences;
  nlohmann::json meta;
};

std::filesystem::path sidecar_path(const std::filesystem::path& raw);

/// All sequences must have the same positive length (InvalidArgument otherwise);
/// write failures throw IoError.
void write_samples(const std::filesystem::path& raw, const std::vector<std::vector<double>>& seqs,
                   nlohmann::json meta = nlohmann::json::object());

/// Throws IoError on missing files, a malformed sidecar, or a size mismatch.
SampleSet read_samples(const std::filesystem::path& raw);

}  // namespace pnf::harness
