// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/harness/baselines.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_interp.h>

#include <memory>

#include "pnf/error.hpp"

namespace pnf::harness {
namespace {

struct InterpDeleter {
  void operator()(gsl_interp* p) const noexcept { gsl_interp_free(p); }
};
struct AccelDeleter {
  void operator()(gsl_interp_accel* p) const noexcept { gsl_interp_accel_free(p); }
};

}  // namespace

const char* interpolation_name(Interpolation method) noexcept {
  return method == Interpolation::linear ? "linear" : "cubic_spline";
}

std::vector<double> interpolate(std::span<const std::size_t> positions,
                                std::span<const double> values, std::size_t n,
                                Interpolation method) {
  if (positions.size() != values.size()) throw InvalidArgument("positions and values differ in length");
  if (positions.empty()) throw InvalidArgument("interpolation needs at least one known sample");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] >= n || (i > 0 && positions[i] <= positions[i - 1])) {
      throw InvalidArgument("positions must be increasing and inside the signal");
    }
  }
  std::vector<double> out(n, values.front());
  if (positions.size() == 1) return out;

  std::vector<double> xs(positions.begin(), positions.end());
  const gsl_interp_type* type =
      method == Interpolation::cubic_spline && xs.size() >= 3 ? gsl_interp_cspline : gsl_interp_linear;
  std::unique_ptr<gsl_interp, InterpDeleter> interp(gsl_interp_alloc(type, xs.size()));
  std::unique_ptr<gsl_interp_accel, AccelDeleter> accel(gsl_interp_accel_alloc());
  if (!interp || !accel) throw std::bad_alloc();
  // Inputs were validated above; keep GSL from aborting the process regardless.
  const auto previous = gsl_set_error_handler_off();
  const int status = gsl_interp_init(interp.get(), xs.data(), values.data(), xs.size());
  gsl_set_error_handler(previous);
  if (status != GSL_SUCCESS) throw InvalidArgument("interpolation setup failed");

  const std::size_t first = positions.front(), last = positions.back();
  for (std::size_t t = 0; t < n; ++t) {
    if (t <= first) {
      out[t] = values.front();
    } else if (t >= last) {
      out[t] = values.back();
    } else {
      out[t] = gsl_interp_eval(interp.get(), xs.data(), values.data(), static_cast<double>(t),
                               accel.get());
    }
  }
  return out;
}

std::vector<double> interpolation_baseline(const MeasurementModel& mm, std::span<const double> y,
                                           Interpolation method) {
  if (y.size() != mm.n_out()) throw InvalidArgument("observation has the wrong length");
  std::vector<std::size_t> positions;
  switch (mm.kind()) {
    case MeasurementModel::Kind::decimate:
      for (std::size_t i = 0; i < mm.n_out(); ++i) positions.push_back(mm.ratio() * (i + 1) - 1);
      break;
    case MeasurementModel::Kind::mask:
      for (std::size_t p = 0; p < mm.n_in(); ++p) {
        if (mm.observed()[p]) positions.push_back(p);
      }
      break;
    case MeasurementModel::Kind::mix:
      throw InvalidArgument("interpolation baselines need a decimate or mask observation");
  }
  return interpolate(positions, y, mm.n_in(), method);
}

}  // namespace pnf::harness
