// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "pnf/error.hpp"

namespace pnf {

MeasurementModel MeasurementModel::mix(std::vector<double> weights, std::size_t n) {
  if (weights.empty()) throw InvalidArgument("mix needs at least one source");
  if (n == 0) throw InvalidArgument("source length must be positive");
  double g = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) throw InvalidArgument("mix weights must be finite");
    g += w * w;
  }
  if (!(g > 0.0)) throw InvalidArgument("mix weights are all zero: singular Gram matrix");
  MeasurementModel m;
  m.kind_ = Kind::mix;
  m.weights_ = std::move(weights);
  m.n_ = n;
  m.n_in_ = n * m.weights_.size();
  m.n_out_ = n;
  return m;
}

MeasurementModel MeasurementModel::decimate(std::size_t ratio, std::size_t n) {
  if (ratio == 0) throw InvalidArgument("decimation ratio must be positive");
  if (n < ratio) throw InvalidArgument("sequence shorter than the decimation ratio");
  MeasurementModel m;
  m.kind_ = Kind::decimate;
  m.ratio_ = ratio;
  m.n_ = n;
  m.n_in_ = n;
  m.n_out_ = n / ratio;
  return m;
}

MeasurementModel MeasurementModel::mask(std::vector<std::uint8_t> observed) {
  if (observed.empty()) throw InvalidArgument("mask must not be empty");
  MeasurementModel m;
  m.kind_ = Kind::mask;
  m.n_ = observed.size();
  m.n_in_ = observed.size();
  m.output_of_.assign(observed.size(), 0);
  for (std::size_t p = 0; p < observed.size(); ++p) {
    if (observed[p] > 1) throw InvalidArgument("mask entries must be 0 or 1");
    if (observed[p]) {
      m.output_of_[p] = m.observed_index_.size();
      m.observed_index_.push_back(p);
    }
  }
  m.n_out_ = m.observed_index_.size();
  for (std::size_t p = 0; p < observed.size(); ++p) {
    if (!observed[p]) m.output_of_[p] = m.n_out_;
  }
  m.observed_ = std::move(observed);
  return m;
}

double MeasurementModel::gram_scale() const noexcept {
  if (covariance_ == Covariance::isotropic || kind_ != Kind::mix) return 1.0;
  double g = 0.0;
  for (double w : weights_) g += w * w;
  return g;
}

void MeasurementModel::check_input(std::span<const double> x) const {
  if (x.size() != n_in_) throw InvalidArgument("input length does not match the measurement");
}

void MeasurementModel::check_output(std::span<const double> y) const {
  if (y.size() != n_out_) throw InvalidArgument("observation length does not match the measurement");
}

double MeasurementModel::predict(std::span<const double> x, std::size_t i) const {
  switch (kind_) {
    case Kind::mix: {
      double v = 0.0;
      for (std::size_t s = 0; s < weights_.size(); ++s) v += weights_[s] * x[s * n_ + i];
      return v;
    }
    case Kind::decimate:
      return x[ratio_ * (i + 1) - 1];
    case Kind::mask:
      return x[observed_index_[i]];
  }
  return 0.0;
}

double MeasurementModel::precision(double sigma) const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
  return 1.0 / (sigma * sigma * gram_scale());
}

std::vector<double> MeasurementModel::apply(std::span<const double> x) const {
  check_input(x);
  std::vector<double> y(n_out_);
  for (std::size_t i = 0; i < n_out_; ++i) y[i] = predict(x, i);
  return y;
}

std::vector<double> MeasurementModel::adjoint(std::span<const double> u) const {
  check_output(u);
  std::vector<double> x(n_in_, 0.0);
  for (std::size_t i = 0; i < n_out_; ++i) {
    switch (kind_) {
      case Kind::mix:
        for (std::size_t s = 0; s < weights_.size(); ++s) x[s * n_ + i] += weights_[s] * u[i];
        break;
      case Kind::decimate:
        x[ratio_ * (i + 1) - 1] += u[i];
        break;
      case Kind::mask:
        x[observed_index_[i]] += u[i];
        break;
    }
  }
  return x;
}

MeasurementModel::LikelihoodGrad MeasurementModel::smoothed_likelihood_grad(
    std::span<const double> x_tilde, std::span<const double> y, double sigma) const {
  check_input(x_tilde);
  check_output(y);
  const double prec = precision(sigma);
  LikelihoodGrad r;
  r.grad.assign(n_in_, 0.0);
  double sq = 0.0;
  for (std::size_t i = 0; i < n_out_; ++i) {
    const double resid = y[i] - predict(x_tilde, i);
    sq += resid * resid;
    const double scaled = resid * prec;
    switch (kind_) {
      case Kind::mix:
        for (std::size_t s = 0; s < weights_.size(); ++s) r.grad[s * n_ + i] = weights_[s] * scaled;
        break;
      case Kind::decimate:
        r.grad[ratio_ * (i + 1) - 1] = scaled;
        break;
      case Kind::mask:
        r.grad[observed_index_[i]] = scaled;
        break;
    }
  }
  r.log_likelihood = -0.5 * sq * prec +
                     0.5 * static_cast<double>(n_out_) * std::log(prec / (2.0 * std::numbers::pi));
  return r;
}

std::vector<std::size_t> MeasurementModel::local_blocks(std::size_t j, std::size_t c) const {
  std::vector<std::size_t> out;
  const std::size_t end = std::min(j + c, n_in_);
  if (j >= end) return out;
  switch (kind_) {
    case Kind::mix: {
      std::vector<char> hit(n_, 0);
      for (std::size_t p = j; p < end; ++p) hit[p % n_] = 1;
      for (std::size_t i = 0; i < n_; ++i) {
        if (hit[i]) out.push_back(i);
      }
      break;
    }
    case Kind::decimate: {
      // r(i+1) - 1 >= j  <=>  i >= ceil((j + 1) / r) - 1
      for (std::size_t i = (j + 1 + ratio_ - 1) / ratio_ - 1; i < n_out_; ++i) {
        const std::size_t p = ratio_ * (i + 1) - 1;
        if (p >= end) break;
        if (p >= j) out.push_back(i);
      }
      break;
    }
    case Kind::mask:
      for (std::size_t p = j; p < end; ++p) {
        if (observed_[p]) out.push_back(output_of_[p]);
      }
      break;
  }
  return out;
}

void MeasurementModel::block_likelihood_grad(std::span<const double> x_tilde,
                                             std::span<const double> y, double sigma,
                                             std::size_t j, std::size_t c,
                                             std::span<double> grad) const {
  check_input(x_tilde);
  check_output(y);
  if (j + c > n_in_) throw InvalidArgument("block exceeds the input length");
  if (grad.size() != c) throw InvalidArgument("block gradient length must equal c");
  const double prec = precision(sigma);
  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t i : local_blocks(j, c)) {
    const double scaled = (y[i] - predict(x_tilde, i)) * prec;
    switch (kind_) {
      case Kind::mix:
        for (std::size_t s = 0; s < weights_.size(); ++s) {
          const std::size_t p = s * n_ + i;
          if (p >= j && p < j + c) grad[p - j] = weights_[s] * scaled;
        }
        break;
      case Kind::decimate:
        grad[ratio_ * (i + 1) - 1 - j] = scaled;
        break;
      case Kind::mask:
        grad[observed_index_[i] - j] = scaled;
        break;
    }
  }
}

std::vector<std::uint8_t> read_mask_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mask file " + path.string());
  std::vector<std::uint8_t> mask;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    if (token == "0") {
      mask.push_back(0);
    } else if (token == "1") {
      mask.push_back(1);
    } else {
      throw ConfigError("mask file line " + std::to_string(lineno) + ": expected 0 or 1");
    }
  }
  if (mask.empty()) throw ConfigError("mask file " + path.string() + " is empty");
  return mask;
}

}  // namespace pnf
