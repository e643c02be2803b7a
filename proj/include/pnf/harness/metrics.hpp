// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "pnf/measure.hpp"
#include "pnf/model.hpp"

namespace pnf::harness {

inline constexpr double kSiSdrCap = 60.0;
inline constexpr double kPsnrCap = 99.0;

/// Scale-invariant SDR in dB, capped at kSiSdrCap. Throws InvalidArgument on
/// a length mismatch or an all-zero target.
double si_sdr(std::span<const double> estimate, std::span<const double> target);

/// 10 log10(peak^2 / MSE), capped at kPsnrCap.
double psnr(std::span<const double> estimate, std::span<const double> target, double peak);

double median(std::vector<double> values);

struct LogLikelihoods {
  std::vector<double> per_sample;  // nats, whole sequence
  double median = 0.0;
};

/// Quantizes each sample and scores it under the noiseless base model.
LogLikelihoods eval_ll(const ConditionalModel& base, std::span<const std::vector<double>> samples);

/// ||A x - y||_inf.
double constraint_residual(const MeasurementModel& mm, std::span<const double> x,
                           std::span<const double> y);

}  // namespace pnf::harness
