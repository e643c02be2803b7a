// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pnf/error.hpp"

namespace pnf {

void require_finite(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidSample(std::string(what) + " contains a non-finite value");
  }
}

double log_sum_exp(std::span<const double> v) noexcept {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

void softmax(std::span<const double> v, std::span<double> out) noexcept {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = std::exp(v[k] - m);
    s += out[k];
  }
  for (double& o : out) o /= s;
}

namespace {

// Context tail plus one placeholder slot for the queried position.
std::vector<double> query_sequence(std::span<const double> context, std::size_t window,
                                   std::size_t& used) {
  used = std::min(context.size(), window);
  std::vector<double> x(context.end() - static_cast<std::ptrdiff_t>(used), context.end());
  x.push_back(0.0);
  return x;
}

}  // namespace

std::vector<double> ConditionalModel::logits(std::span<const double> context) const {
  require_finite(context, "context");
  std::size_t used = 0;
  const auto x = query_sequence(context, window(), used);
  const auto pass = forward(x);
  const auto row = pass->logits().row(used);
  return {row.begin(), row.end()};
}

std::vector<double> ConditionalModel::input_vjp(std::span<const double> context,
                                                std::span<const double> upstream) const {
  require_finite(context, "context");
  if (upstream.size() != bins()) throw InvalidArgument("upstream length must equal bin count");
  std::size_t used = 0;
  const auto x = query_sequence(context, window(), used);
  std::vector<double> grad(x.size(), 0.0);
  if (input_differentiable()) {
    const auto pass = forward(x);
    Matrix up(x.size(), bins());
    std::copy(upstream.begin(), upstream.end(), up.row(used).begin());
    pass->backward(up, grad);
  }
  grad.pop_back();
  return grad;
}

}  // namespace pnf
