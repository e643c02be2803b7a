// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/conv_net.hpp"

#include <algorithm>
#include <cmath>

#include "pnf/error.hpp"
#include "pnf/simd/kernels.hpp"

namespace pnf {

// Activations of one evaluation. Time index t runs over the left-padded input
// z = (sentinel x w, x_0, ..., x_{n-1}); logits row i is read at t = w + i - 1.
class ConvPass final : public ForwardPass {
 public:
  ConvPass(const CausalConvNet& net, std::span<const double> x) : net_(net) {
    const std::size_t w = net.window_;
    const std::size_t n = x.size();
    const std::size_t d = net.bins();
    const std::size_t c = net.config_.channels;
    const std::size_t conv_layers = net.config_.dilations.size();
    const auto& k = simd::active();

    z_.assign(w + n, net.grid_.sentinel());
    std::copy(x.begin(), x.end(), z_.begin() + static_cast<std::ptrdiff_t>(w));
    steps_ = n == 0 ? 0 : w + n - 1;

    a_.reserve(conv_layers);
    h_.reserve(conv_layers);
    for (std::size_t l = 0; l < conv_layers; ++l) {
      const auto& shape = net.shapes_[l];
      const double* wts = net.params_.data() + net.offsets_[l].weight;
      const double* bias = net.params_.data() + net.offsets_[l].bias;
      Matrix a(steps_, c);
      Matrix h(steps_, c);
      for (std::size_t t = 0; t < steps_; ++t) {
        double* out = a.data() + t * c;
        std::copy_n(bias, c, out);
        for (std::size_t tap = 0; tap < shape.kernel; ++tap) {
          const std::size_t lag = tap * shape.dilation;
          if (lag > t) break;
          k.matvec(out, wts + tap * c * shape.in, input(l, t - lag), c, shape.in);
        }
        double* hr = h.data() + t * c;
        for (std::size_t ch = 0; ch < c; ++ch) {
          out[ch] = std::tanh(out[ch]);
          hr[ch] = (l > 0 ? h_[l - 1](t, ch) : 0.0) + out[ch];
        }
      }
      a_.push_back(std::move(a));
      h_.push_back(std::move(h));
    }

    const std::size_t head = conv_layers;
    const double* w1 = net.params_.data() + net.offsets_[head].weight;
    const double* b1 = net.params_.data() + net.offsets_[head].bias;
    const double* w2 = net.params_.data() + net.offsets_[head + 1].weight;
    const double* b2 = net.params_.data() + net.offsets_[head + 1].bias;
    g_ = Matrix(n, c);
    logits_ = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t t = w + i - 1;
      double* g = g_.data() + i * c;
      std::copy_n(b1, c, g);
      k.matvec(g, w1, last_hidden(t), c, c);
      for (std::size_t ch = 0; ch < c; ++ch) g[ch] = std::tanh(g[ch]);
      double* out = logits_.data() + i * d;
      std::copy_n(b2, d, out);
      k.matvec(out, w2, g, d, c);
    }
  }

  void backward(const Matrix& upstream, std::span<double> grad_x) const override {
    run_backward(upstream, {}, grad_x);
  }

  void run_backward(const Matrix& upstream, std::span<double> grad_params,
                    std::span<double> grad_x) const {
    const auto& net = net_;
    const std::size_t w = net.window_;
    const std::size_t n = g_.rows();
    const std::size_t d = net.bins();
    const std::size_t c = net.config_.channels;
    const std::size_t conv_layers = net.config_.dilations.size();
    const bool want_params = !grad_params.empty();
    const auto& k = simd::active();
    if (upstream.rows() != n || upstream.cols() != d) {
      throw InvalidArgument("upstream shape must match the logits");
    }

    const std::size_t head = conv_layers;
    const double* w1 = net.params_.data() + net.offsets_[head].weight;
    const double* w2 = net.params_.data() + net.offsets_[head + 1].weight;

    Matrix dh(steps_, c);
    std::vector<char> live(steps_, 0);
    std::vector<double> dg(c);
    for (std::size_t i = 0; i < n; ++i) {
      const auto u = upstream.row(i);
      if (std::all_of(u.begin(), u.end(), [](double v) { return v == 0.0; })) continue;
      const std::size_t t = w + i - 1;
      const double* g = g_.data() + i * c;
      std::fill(dg.begin(), dg.end(), 0.0);
      k.matvec_t(dg.data(), w2, u.data(), d, c);
      if (want_params) {
        k.outer(grad_params.data() + net.offsets_[head + 1].weight, u.data(), g, d, c);
        k.axpy(grad_params.data() + net.offsets_[head + 1].bias, 1.0, u.data(), d);
      }
      for (std::size_t ch = 0; ch < c; ++ch) dg[ch] *= 1.0 - g[ch] * g[ch];
      if (want_params) {
        k.outer(grad_params.data() + net.offsets_[head].weight, dg.data(), last_hidden(t), c, c);
        k.axpy(grad_params.data() + net.offsets_[head].bias, 1.0, dg.data(), c);
      }
      k.matvec_t(dh.data() + t * c, w1, dg.data(), c, c);
      live[t] = 1;
    }

    std::vector<double> da(c);
    std::vector<double> dz;
    for (std::size_t l = conv_layers; l-- > 0;) {
      const auto& shape = net.shapes_[l];
      const double* wts = net.params_.data() + net.offsets_[l].weight;
      Matrix dprev(l > 0 ? steps_ : 0, c);
      if (l == 0) dz.assign(z_.size(), 0.0);
      std::vector<char> prev_live(steps_, 0);
      for (std::size_t t = steps_; t-- > 0;) {
        if (!live[t]) continue;
        const double* dht = dh.data() + t * c;
        const double* a = a_[l].data() + t * c;
        if (l > 0) {
          k.axpy(dprev.data() + t * c, 1.0, dht, c);
          prev_live[t] = 1;
        }
        for (std::size_t ch = 0; ch < c; ++ch) da[ch] = dht[ch] * (1.0 - a[ch] * a[ch]);
        if (want_params) k.axpy(grad_params.data() + net.offsets_[l].bias, 1.0, da.data(), c);
        for (std::size_t tap = 0; tap < shape.kernel; ++tap) {
          const std::size_t lag = tap * shape.dilation;
          if (lag > t) break;
          const double* wt = wts + tap * c * shape.in;
          if (want_params) {
            k.outer(grad_params.data() + net.offsets_[l].weight + tap * c * shape.in, da.data(),
                    input(l, t - lag), c, shape.in);
          }
          if (l > 0) {
            k.matvec_t(dprev.data() + (t - lag) * c, wt, da.data(), c, shape.in);
            prev_live[t - lag] = 1;
          } else {
            dz[t - lag] += k.dot(wt, da.data(), c);
          }
        }
      }
      if (l > 0) {
        dh = std::move(dprev);
        live = std::move(prev_live);
      }
    }
    if (!grad_x.empty() && !dz.empty()) {
      for (std::size_t i = 0; i < n; ++i) grad_x[i] += dz[w + i];
    }
  }

  const CausalConvNet& owner() const noexcept { return net_; }

 private:
  const double* input(std::size_t layer, std::size_t t) const noexcept {
    return layer == 0 ? z_.data() + t : h_[layer - 1].data() + t * net_.config_.channels;
  }
  const double* last_hidden(std::size_t t) const noexcept {
    return h_.back().data() + t * net_.config_.channels;
  }

  const CausalConvNet& net_;
  std::vector<double> z_;
  std::size_t steps_ = 0;
  std::vector<Matrix> a_;
  std::vector<Matrix> h_;
  Matrix g_;
};

CausalConvNet::CausalConvNet(DiscretizationGrid grid, ConvNetConfig config)
    : grid_(std::move(grid)), config_(std::move(config)) {
  if (config_.channels == 0 || config_.kernel == 0 || config_.dilations.empty()) {
    throw InvalidArgument("network needs channels, kernel width and at least one layer");
  }
  const std::size_t c = config_.channels;
  window_ = 1;
  for (std::size_t l = 0; l < config_.dilations.size(); ++l) {
    const std::size_t dil = config_.dilations[l];
    if (dil == 0) throw InvalidArgument("dilation must be positive");
    shapes_.push_back({l == 0 ? std::size_t{1} : c, c, config_.kernel, dil});
    window_ += dil * (config_.kernel - 1);
  }
  shapes_.push_back({c, c, 1, 1});
  shapes_.push_back({c, grid_.size(), 1, 1});

  std::size_t offset = 0;
  for (const auto& s : shapes_) {
    Offsets o{offset, offset + s.kernel * s.out * s.in};
    offsets_.push_back(o);
    offset = o.bias + s.out;
  }
  params_.assign(offset, 0.0);
}

void CausalConvNet::initialize(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::fill(params_.begin(), params_.end(), 0.0);
  for (std::size_t l = 0; l + 1 < shapes_.size(); ++l) {
    const auto& s = shapes_[l];
    const double scale = 1.0 / std::sqrt(static_cast<double>(s.kernel * s.in));
    for (std::size_t p = offsets_[l].weight; p < offsets_[l].bias; ++p) {
      params_[p] = scale * normal(rng);
    }
  }
}

std::unique_ptr<ForwardPass> CausalConvNet::forward(std::span<const double> x) const {
  return std::make_unique<ConvPass>(*this, x);
}

void CausalConvNet::backward(const ForwardPass& pass, const Matrix& upstream,
                             std::span<double> grad_params, std::span<double> grad_x) const {
  const auto* conv = dynamic_cast<const ConvPass*>(&pass);
  if (conv == nullptr || &conv->owner() != this) {
    throw InvalidArgument("forward pass does not belong to this network");
  }
  if (grad_params.size() != params_.size()) {
    throw InvalidArgument("parameter gradient has the wrong length");
  }
  conv->run_backward(upstream, grad_params, grad_x);
}

}  // namespace pnf
