// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/checkpoint.hpp"

#include <fstream>
#include <vector>

#include "pnf/binary_io.hpp"
#include "pnf/conv_net.hpp"
#include "pnf/error.hpp"
#include "pnf/noisy_tabular.hpp"
#include "pnf/tabular.hpp"

namespace pnf {
namespace {

constexpr std::string_view kMagic = "PNFM";

struct Header {
  DiscretizationGrid grid;
  ModelKind kind;
  std::vector<std::uint32_t> dims;
};

void write_dims(std::ostream& out, ModelKind kind, const std::vector<std::uint32_t>& dims,
                std::uint32_t count) {
  io::write_u32(out, static_cast<std::uint32_t>(kind));
  io::write_u32(out, count);
  for (auto v : dims) io::write_u32(out, v);
}

Header read_header(std::istream& in) {
  io::expect_magic(in, kMagic);
  const auto version = io::read_u32(in);
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  auto grid = read_grid(in);
  const auto kind = io::read_u32(in);
  const auto count = io::read_u32(in);
  std::vector<std::uint32_t> dims;
  switch (kind) {
    case 0:
      if (count == 0 || count > 1024) throw IoError("bad layer count");
      dims.resize(4 * std::size_t{count});
      break;
    case 1:
      if (count != 1) throw IoError("bad tabular descriptor");
      dims.resize(1);
      break;
    case 2:
      if (count != 2) throw IoError("bad noisy tabular descriptor");
      dims.resize(2);
      break;
    default:
      throw IoError("unknown model kind " + std::to_string(kind));
  }
  for (auto& v : dims) v = io::read_u32(in);
  return {std::move(grid), static_cast<ModelKind>(kind), std::move(dims)};
}

std::size_t table_size(std::size_t d, std::size_t order) {
  if (order == 0 || order > TabularMarkovModel::kMaxOrder) throw IoError("bad tabular order");
  std::size_t rows = 1;
  for (std::size_t i = 0; i < order; ++i) rows *= d;
  return rows * d;
}

std::size_t param_count(const Header& h) {
  switch (h.kind) {
    case ModelKind::conv_net: {
      std::size_t total = 0;
      for (std::size_t l = 0; l < h.dims.size(); l += 4) {
        total += std::size_t{h.dims[l + 2]} * h.dims[l + 1] * h.dims[l] + h.dims[l + 1];
      }
      return total;
    }
    case ModelKind::tabular:
      return table_size(h.grid.size(), h.dims[0]);
    case ModelKind::exact_noisy:
      return 1 + table_size(h.grid.size(), h.dims[0]);
  }
  return 0;
}

// Stored tables are f32, so rows are renormalized before validation.
TabularMarkovModel read_table(std::istream& in, const DiscretizationGrid& grid, std::size_t order) {
  std::vector<double> table(table_size(grid.size(), order));
  io::read_f32_array(in, table);
  const std::size_t d = grid.size();
  for (std::size_t r = 0; r < table.size(); r += d) {
    double sum = 0.0;
    for (std::size_t k = 0; k < d; ++k) sum += table[r + k];
    if (!(sum > 0.0)) throw IoError("tabular row has no mass");
    for (std::size_t k = 0; k < d; ++k) table[r + k] /= sum;
  }
  return TabularMarkovModel(grid, order, std::move(table));
}

}  // namespace

void save_model(std::ostream& out, const ConditionalModel& model) {
  io::write_magic(out, kMagic);
  io::write_u32(out, kCheckpointVersion);
  write_grid(out, model.grid());
  if (const auto* net = dynamic_cast<const CausalConvNet*>(&model)) {
    std::vector<std::uint32_t> dims;
    for (const auto& s : net->layers()) {
      for (auto v : {s.in, s.out, s.kernel, s.dilation}) dims.push_back(static_cast<std::uint32_t>(v));
    }
    write_dims(out, ModelKind::conv_net, dims, static_cast<std::uint32_t>(net->layers().size()));
    io::write_f32_array(out, net->params());
  } else if (const auto* tab = dynamic_cast<const TabularMarkovModel*>(&model)) {
    write_dims(out, ModelKind::tabular, {static_cast<std::uint32_t>(tab->order())}, 1);
    io::write_f32_array(out, tab->table());
  } else if (const auto* noisy = dynamic_cast<const ExactNoisyMarkovModel*>(&model)) {
    write_dims(out, ModelKind::exact_noisy,
               {static_cast<std::uint32_t>(noisy->base().order()),
                static_cast<std::uint32_t>(noisy->window())},
               2);
    io::write_f32(out, static_cast<float>(noisy->sigma()));
    io::write_f32_array(out, noisy->base().table());
  } else {
    throw InvalidArgument("model type cannot be serialized");
  }
  if (!out) throw IoError("checkpoint write failed");
}

void save_model(const std::filesystem::path& path, const ConditionalModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_model(out, model);
}

std::unique_ptr<ConditionalModel> load_model(std::istream& in, double sigma_override) {
  const Header h = read_header(in);
  switch (h.kind) {
    case ModelKind::conv_net: {
      const std::size_t layers = h.dims.size() / 4;
      if (layers < 3) throw IoError("conv net needs at least one conv and two head layers");
      ConvNetConfig config;
      config.channels = h.dims[1];
      config.kernel = h.dims[2];
      config.dilations.clear();
      for (std::size_t l = 0; l + 2 < layers; ++l) config.dilations.push_back(h.dims[4 * l + 3]);
      auto net = std::make_unique<CausalConvNet>(h.grid, config);
      if (net->layers().size() != layers) throw IoError("conv descriptor mismatch");
      for (std::size_t l = 0; l < layers; ++l) {
        const auto& s = net->layers()[l];
        if (s.in != h.dims[4 * l] || s.out != h.dims[4 * l + 1] || s.kernel != h.dims[4 * l + 2] ||
            s.dilation != h.dims[4 * l + 3]) {
          throw IoError("conv layer " + std::to_string(l) + " has an unsupported shape");
        }
      }
      io::read_f32_array(in, net->params());
      return net;
    }
    case ModelKind::tabular:
      return std::make_unique<TabularMarkovModel>(read_table(in, h.grid, h.dims[0]));
    case ModelKind::exact_noisy: {
      const double stored = io::read_f32(in);
      auto table = read_table(in, h.grid, h.dims[0]);
      return std::make_unique<ExactNoisyMarkovModel>(
          std::move(table), sigma_override > 0.0 ? sigma_override : stored, h.dims[1]);
    }
  }
  throw IoError("unknown model kind");
}

std::unique_ptr<ConditionalModel> load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load_model(in);
}

void skip_model(std::istream& in) {
  const Header h = read_header(in);
  in.seekg(static_cast<std::streamoff>(4 * param_count(h)), std::ios::cur);
  if (!in) throw IoError("truncated model block");
}

}  // namespace pnf
