// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "pnf/binary_io.hpp"
#include "pnf/error.hpp"

namespace pnf {

double mu_law_encode(double x, double mu) {
  if (!(mu > 0.0)) throw InvalidArgument("mu must be positive");
  if (!(std::abs(x) <= 1.0)) throw RangeError("mu-law input outside [-1, 1]");
  const double mag = std::log1p(mu * std::abs(x)) / std::log1p(mu);
  return std::copysign(mag, x);
}

double mu_law_decode(double u, double mu) {
  if (!(mu > 0.0)) throw InvalidArgument("mu must be positive");
  if (!(std::abs(u) <= 1.0)) throw RangeError("mu-law code outside [-1, 1]");
  const double mag = std::expm1(std::abs(u) * std::log1p(mu)) / mu;
  return std::copysign(mag, u);
}

DiscretizationGrid::DiscretizationGrid(std::vector<double> values, Companding companding)
    : values_(std::move(values)), companding_(companding) {
  if (values_.empty()) throw InvalidArgument("grid needs at least one bin");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) throw InvalidArgument("grid values must be finite");
    if (k > 0 && !(values_[k] > values_[k - 1])) {
      throw InvalidArgument("grid values must be strictly increasing");
    }
  }
}

DiscretizationGrid DiscretizationGrid::linear(std::size_t d, double lo, double hi) {
  if (d == 0) throw InvalidArgument("grid needs at least one bin");
  if (!(hi > lo)) throw InvalidArgument("grid range must satisfy lo < hi");
  std::vector<double> v(d);
  const double width = (hi - lo) / static_cast<double>(d);
  for (std::size_t k = 0; k < d; ++k) v[k] = lo + (static_cast<double>(k) + 0.5) * width;
  return DiscretizationGrid(std::move(v), Companding::linear());
}

DiscretizationGrid DiscretizationGrid::mu_law(std::size_t d, double mu) {
  if (d == 0) throw InvalidArgument("grid needs at least one bin");
  const DiscretizationGrid companded = linear(d, -1.0, 1.0);
  std::vector<double> v(d);
  for (std::size_t k = 0; k < d; ++k) v[k] = mu_law_decode(companded[k], mu);
  return DiscretizationGrid(std::move(v), Companding::mu_law(mu));
}

DiscretizationGrid DiscretizationGrid::from_values(std::vector<double> values,
                                                   Companding companding) {
  return DiscretizationGrid(std::move(values), companding);
}

std::size_t DiscretizationGrid::quantize(double x) const {
  if (!std::isfinite(x)) throw InvalidSample("cannot quantize a non-finite sample");
  const auto it = std::lower_bound(values_.begin(), values_.end(), x);
  if (it == values_.begin()) return 0;
  if (it == values_.end()) return values_.size() - 1;
  const auto hi = static_cast<std::size_t>(it - values_.begin());
  const std::size_t lo = hi - 1;
  return (x - values_[lo] <= values_[hi] - x) ? lo : hi;
}

std::vector<std::uint32_t> DiscretizationGrid::quantize(std::span<const double> xs) const {
  std::vector<std::uint32_t> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = static_cast<std::uint32_t>(quantize(xs[i]));
  return out;
}

std::vector<double> DiscretizationGrid::snap(std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = values_[quantize(xs[i])];
  return out;
}

std::vector<double> DiscretizationGrid::to_values(std::span<const std::uint32_t> bins) const {
  std::vector<double> out(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) out[i] = values_.at(bins[i]);
  return out;
}

bool DiscretizationGrid::operator==(const DiscretizationGrid& other) const {
  if (values_ != other.values_ || companding_.kind != other.companding_.kind) return false;
  if (companding_.kind == CompandingKind::linear) return true;
  return std::abs(companding_.mu - other.companding_.mu) <= 1e-9 * companding_.mu;
}

void write_grid(std::ostream& out, const DiscretizationGrid& grid) {
  io::write_u32(out, static_cast<std::uint32_t>(grid.size()));
  io::write_u8(out, static_cast<std::uint8_t>(grid.companding().kind));
  for (double v : grid.values()) io::write_f64(out, v);
}

namespace {

// The format stores only the centers; mu is recovered from the outermost
// center, which decreases monotonically in mu.
double recover_mu(const std::vector<double>& values) {
  const std::size_t d = values.size();
  const double code = 1.0 - 1.0 / static_cast<double>(d);
  const double target = values.back();
  double lo = 1e-9;
  double hi = 1e9;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (mu_law_decode(code, mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

}  // namespace

DiscretizationGrid read_grid(std::istream& in) {
  const std::uint32_t d = io::read_u32(in);
  const std::uint8_t tag = io::read_u8(in);
  if (d == 0 || d > (1u << 24)) throw IoError("implausible grid size " + std::to_string(d));
  if (tag > 1) throw IoError("unknown companding tag " + std::to_string(tag));
  std::vector<double> values(d);
  for (auto& v : values) v = io::read_f64(in);
  Companding comp = Companding::linear();
  if (tag == 1) {
    comp = Companding::mu_law(d > 1 ? recover_mu(values) : 255.0);
  }
  try {
    return DiscretizationGrid::from_values(std::move(values), comp);
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("corrupt grid block: ") + e.what());
  }
}

}  // namespace pnf
