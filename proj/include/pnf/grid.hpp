// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace pnf {

enum class CompandingKind : std::uint8_t { linear = 0, mu_law = 1 };

struct Companding {
  CompandingKind kind = CompandingKind::linear;
  double mu = 0.0;  // only meaningful for mu_law

  static Companding linear() { return {}; }
  static Companding mu_law(double mu) { return {CompandingKind::mu_law, mu}; }
  bool operator==(const Companding&) const = default;
};

/// sign(x) * ln(1 + mu|x|) / ln(1 + mu). Throws RangeError for |x| > 1.
double mu_law_encode(double x, double mu);
/// Inverse of mu_law_encode. Throws RangeError for |u| > 1.
double mu_law_decode(double u, double mu);

/// The ordered support {e_0 < ... < e_{d-1}} of a discretized model. Bin
/// centers are the Dirac locations; quantization is nearest-center.
///
/// Indices are 0-based throughout the library.
class DiscretizationGrid {
 public:
  /// Centers lo + (k + 1/2)(hi - lo)/d.
  static DiscretizationGrid linear(std::size_t d, double lo, double hi);
  /// Linear grid on [-1, 1] in companded space, mapped back through the decoder.
  static DiscretizationGrid mu_law(std::size_t d, double mu);
  /// Explicit centers; must be finite and strictly increasing.
  static DiscretizationGrid from_values(std::vector<double> values,
                                        Companding companding = Companding::linear());

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double value(std::size_t k) const { return values_.at(k); }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  const Companding& companding() const noexcept { return companding_; }
  double lo() const noexcept { return values_.front(); }
  double hi() const noexcept { return values_.back(); }

  /// Nearest center; ties go to the smaller index. Throws InvalidSample for non-finite x.
  std::size_t quantize(double x) const;
  std::vector<std::uint32_t> quantize(std::span<const double> xs) const;
  std::vector<double> snap(std::span<const double> xs) const;
  std::vector<double> to_values(std::span<const std::uint32_t> bins) const;

  /// Padding bin for positions before the start of a sequence: the 1-based
  /// center ceil(d/2), i.e. 0-based index ceil(d/2) - 1.
  std::size_t sentinel_index() const noexcept { return (values_.size() + 1) / 2 - 1; }
  double sentinel() const noexcept { return values_[sentinel_index()]; }

  /// Same centers and companding kind; mu compared to 1e-9 relative since the
  /// serialized form recovers it from the centers.
  bool operator==(const DiscretizationGrid& other) const;

 private:
  DiscretizationGrid(std::vector<double> values, Companding companding);

  std::vector<double> values_;
  Companding companding_;
};

// d (u32), companding tag (u8), then d f64 centers. Little-endian.
void write_grid(std::ostream& out, const DiscretizationGrid& grid);
DiscretizationGrid read_grid(std::istream& in);

}  // namespace pnf
