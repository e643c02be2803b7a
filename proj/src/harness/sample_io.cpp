// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/harness/sample_io.hpp"

#include <bit>
#include <fstream>

#include "pnf/error.hpp"

namespace pnf::harness {
namespace {

std::uint32_t to_little(std::uint32_t v) noexcept {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& raw) {
  return std::filesystem::path(raw.string() + ".json");
}

void write_samples(const std::filesystem::path& raw, const std::vector<std::vector<double>>& seqs,
                   nlohmann::json meta) {
  if (seqs.empty() || seqs.front().empty()) throw InvalidArgument("no samples to write");
  const std::size_t n = seqs.front().size();
  for (const auto& s : seqs) {
    if (s.size() != n) throw InvalidArgument("samples differ in length");
  }
  std::ofstream out(raw, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + raw.string());
  for (const auto& s : seqs) {
    for (double v : s) {
      const auto bits = to_little(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
  if (!out) throw IoError("short write to " + raw.string());

  meta["n"] = n;
  meta["count"] = seqs.size();
  meta["format"] = "f32le";
  std::ofstream side(sidecar_path(raw), std::ios::trunc);
  if (!side) throw IoError("cannot write " + sidecar_path(raw).string());
  side << meta.dump(2) << '\n';
  if (!side) throw IoError("short write to " + sidecar_path(raw).string());
}

SampleSet read_samples(const std::filesystem::path& raw) {
  std::ifstream side(sidecar_path(raw));
  if (!side) throw IoError("missing sidecar " + sidecar_path(raw).string());
  SampleSet set;
  try {
    set.meta = nlohmann::json::parse(side);
    set.n = set.meta.at("n").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed sidecar " + sidecar_path(raw).string() + ": " + e.what());
  }
  if (set.n == 0) throw IoError("sidecar declares an empty sequence length");

  std::ifstream in(raw, std::ios::binary);
  if (!in) throw IoError("cannot open " + raw.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  const std::size_t per_seq = set.n * sizeof(float);
  if (bytes % per_seq != 0) throw IoError(raw.string() + " is not a whole number of sequences");
  const std::size_t count = bytes / per_seq;
  if (set.meta.contains("count") && set.meta["count"] != count) {
    throw IoError(raw.string() + " does not match the sidecar count");
  }
  set.sequences.assign(count, std::vector<double>(set.n));
  for (auto& s : set.sequences) {
    for (double& v : s) {
      std::uint32_t bits = 0;
      in.read(reinterpret_cast<char*>(&bits), sizeof bits);
      v = std::bit_cast<float>(to_little(bits));
    }
  }
  if (!in) throw IoError("short read from " + raw.string());
  return set;
}

}  // namespace pnf::harness
