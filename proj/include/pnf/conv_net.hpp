// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pnf/model.hpp"
#include "pnf/random.hpp"

namespace pnf {

struct ConvNetConfig {
  std::size_t channels = 32;
  std::size_t kernel = 2;
  std::vector<std::size_t> dilations = {1, 2, 4, 8};
};

/// One convolution in the network. Head layers are 1x1 (kernel 1, dilation 1).
struct ConvLayerShape {
  std::size_t in;
  std::size_t out;
  std::size_t kernel;
  std::size_t dilation;
};

/// Small WaveNet-style conditional: a stack of dilated causal convolutions
/// over the scalar input (first layer 1 -> C, then residual C -> C with tanh),
/// followed by a tanh 1x1 layer and a linear 1x1 projection to d logits.
/// The logits at position i are read from the features at i-1, so they depend
/// on x_{i-w}..x_{i-1} only, with w = 1 + sum_l dilation_l (kernel - 1).
///
/// Parameters live in one flat vector in declaration order: per layer the
/// weights [tap][out][in] followed by the biases. The projection starts at
/// zero so a fresh network predicts the uniform distribution.
class CausalConvNet final : public ConditionalModel {
 public:
  CausalConvNet(DiscretizationGrid grid, ConvNetConfig config = {});

  /// Gaussian weights scaled by 1/sqrt(fan_in); biases and the projection stay zero.
  void initialize(Rng& rng);

  const DiscretizationGrid& grid() const noexcept override { return grid_; }
  std::size_t window() const noexcept override { return window_; }
  bool input_differentiable() const noexcept override { return true; }
  std::unique_ptr<ForwardPass> forward(std::span<const double> x) const override;

  /// Adds upstream-weighted gradients into `grad_params` (length param_count())
  /// and, if non-empty, `grad_x`. `pass` must come from this network's forward.
  void backward(const ForwardPass& pass, const Matrix& upstream, std::span<double> grad_params,
                std::span<double> grad_x) const;

  const ConvNetConfig& config() const noexcept { return config_; }
  const std::vector<ConvLayerShape>& layers() const noexcept { return shapes_; }
  std::size_t param_count() const noexcept { return params_.size(); }
  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }

 private:
  struct Offsets {
    std::size_t weight;
    std::size_t bias;
  };

  friend class ConvPass;

  DiscretizationGrid grid_;
  ConvNetConfig config_;
  std::vector<ConvLayerShape> shapes_;
  std::vector<Offsets> offsets_;
  std::vector<double> params_;
  std::size_t window_ = 0;
};

}  // namespace pnf
