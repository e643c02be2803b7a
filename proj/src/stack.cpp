// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/stack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pnf/binary_io.hpp"
#include "pnf/checkpoint.hpp"
#include "pnf/error.hpp"

namespace pnf {
namespace {

constexpr std::string_view kMagic = "PNFS";
constexpr std::uint32_t kStackVersion = 1;

void check_sigmas(std::span<const double> sigmas) {
  if (sigmas.empty()) throw InvalidArgument("stack needs at least one level");
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > 0.0) || !std::isfinite(sigmas[i])) {
      throw InvalidArgument("stack sigmas must be positive");
    }
    if (i > 0 && !(sigmas[i] < sigmas[i - 1])) {
      throw InvalidArgument("stack sigmas must be strictly decreasing");
    }
  }
}

}  // namespace

NoisyModelStack NoisyModelStack::in_memory(std::vector<double> sigmas, std::vector<Model> models) {
  check_sigmas(sigmas);
  if (models.size() != sigmas.size()) throw InvalidArgument("one model per noise level required");
  NoisyModelStack s;
  for (const auto& m : models) {
    if (!m) throw InvalidArgument("null model in stack");
    if (!(m->grid() == models.front()->grid())) throw InvalidArgument("stack models must share a grid");
    s.window_ = std::max(s.window_, m->window());
  }
  s.grid_ = std::make_shared<DiscretizationGrid>(models.front()->grid());
  s.sigmas_ = std::move(sigmas);
  s.models_ = std::move(models);
  return s;
}

NoisyModelStack NoisyModelStack::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  io::expect_magic(in, kMagic);
  if (io::read_u32(in) != kStackVersion) throw IoError("unsupported stack version");
  const auto levels = io::read_u32(in);
  if (levels == 0 || levels > 4096) throw IoError("bad level count");
  NoisyModelStack s;
  s.path_ = path;
  s.sigmas_.resize(levels);
  for (double& v : s.sigmas_) v = io::read_f64(in);
  try {
    check_sigmas(s.sigmas_);
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("corrupt stack header: ") + e.what());
  }
  for (std::uint32_t l = 0; l < levels; ++l) {
    s.offsets_.push_back(in.tellg());
    // Each block is read once so a damaged file fails at open; only one
    // model is alive at a time.
    const auto model = load_model(in, s.sigmas_[l]);
    if (l == 0) {
      s.grid_ = std::make_shared<DiscretizationGrid>(model->grid());
    } else if (!(model->grid() == *s.grid_)) {
      throw IoError("stack levels use different grids");
    }
    s.window_ = std::max(s.window_, model->window());
  }
  return s;
}

NoisyModelStack::Model NoisyModelStack::load(std::size_t level) const {
  if (level >= sigmas_.size()) throw InvalidArgument("level out of range");
  if (!file_backed()) return models_[level];
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw IoError("cannot open " + path_.string());
  in.seekg(offsets_[level]);
  return load_model(in, sigmas_[level]);
}

void save_stack(const std::filesystem::path& path, std::span<const double> sigmas,
                const std::function<NoisyModelStack::Model(std::size_t)>& model_at) {
  check_sigmas(sigmas);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  io::write_magic(out, kMagic);
  io::write_u32(out, kStackVersion);
  io::write_u32(out, static_cast<std::uint32_t>(sigmas.size()));
  for (double s : sigmas) io::write_f64(out, s);
  for (std::size_t l = 0; l < sigmas.size(); ++l) {
    const auto model = model_at(l);
    if (!model) throw InvalidArgument("null model in stack");
    save_model(out, *model);
  }
  if (!out) throw IoError("stack write failed");
}

}  // namespace pnf
