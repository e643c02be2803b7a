// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace pnf {

/// Structured linear observation y = A x.
///
///   mix       x = (x_1, ..., x_s) stacked sources of length n; y_i = sum_s w_s x_{s,i}
///   decimate  y_i = x_{r(i+1)-1}, i < floor(n / r)   (every r-th sample, 0-based)
///   mask      y = the entries of x where m = 1, in order
///
/// A A^T is a multiple of the identity for all three kinds (sum w^2 for mix,
/// 1 otherwise), so the smoothed likelihood N(y; A x~, sigma^2 A A^T) has a
/// closed-form gradient.
class MeasurementModel {
 public:
  enum class Kind { mix, decimate, mask };
  /// Covariance of the smoothed likelihood: sigma^2 A A^T, or sigma^2 I.
  enum class Covariance { gram, isotropic };

  static MeasurementModel mix(std::vector<double> weights, std::size_t n);
  static MeasurementModel decimate(std::size_t ratio, std::size_t n);
  static MeasurementModel mask(std::vector<std::uint8_t> observed);

  Kind kind() const noexcept { return kind_; }
  std::size_t n_in() const noexcept { return n_in_; }
  std::size_t n_out() const noexcept { return n_out_; }
  /// Length of one source (n_in for single-source kinds).
  std::size_t source_length() const noexcept { return n_; }
  std::size_t sources() const noexcept { return kind_ == Kind::mix ? weights_.size() : 1; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t ratio() const noexcept { return ratio_; }
  std::span<const std::uint8_t> observed() const noexcept { return observed_; }

  Covariance covariance() const noexcept { return covariance_; }
  void set_covariance(Covariance c) noexcept { covariance_ = c; }
  /// Diagonal of A A^T (or 1 for the isotropic covariance).
  double gram_scale() const noexcept;

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> adjoint(std::span<const double> u) const;

  struct LikelihoodGrad {
    double log_likelihood = 0.0;
    std::vector<double> grad;
  };
  /// log N(y; A x~, sigma^2 G) and A^T (sigma^2 G)^{-1} (y - A x~).
  LikelihoodGrad smoothed_likelihood_grad(std::span<const double> x_tilde,
                                          std::span<const double> y, double sigma) const;

  /// Output indices i whose inputs N(i) intersect [j, j + c), ascending.
  std::vector<std::size_t> local_blocks(std::size_t j, std::size_t c) const;

  /// The likelihood gradient restricted to inputs [j, j + c), written to
  /// `grad` (length c). Reads x_tilde only at inputs of local_blocks(j, c).
  /// Per coordinate the arithmetic matches smoothed_likelihood_grad exactly.
  void block_likelihood_grad(std::span<const double> x_tilde, std::span<const double> y,
                             double sigma, std::size_t j, std::size_t c,
                             std::span<double> grad) const;

 private:
  MeasurementModel() = default;

  void check_input(std::span<const double> x) const;
  void check_output(std::span<const double> y) const;
  double predict(std::span<const double> x, std::size_t i) const;
  // Inverse precision weight 1 / (sigma^2 G).
  double precision(double sigma) const;

  Kind kind_ = Kind::mask;
  Covariance covariance_ = Covariance::gram;
  std::size_t n_ = 0;
  std::size_t n_in_ = 0;
  std::size_t n_out_ = 0;
  std::vector<double> weights_;
  std::size_t ratio_ = 1;
  std::vector<std::uint8_t> observed_;
  std::vector<std::size_t> observed_index_;  // output index -> input index
  std::vector<std::size_t> output_of_;       // input index -> output index (or n_out)
};

/// One 0/1 integer per line.
std::vector<std::uint8_t> read_mask_file(const std::filesystem::path& path);

}  // namespace pnf
