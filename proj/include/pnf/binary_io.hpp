// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>

// Little-endian primitives shared by the checkpoint and sample formats.
namespace pnf::io {

void write_u8(std::ostream& out, std::uint8_t v);
void write_u32(std::ostream& out, std::uint32_t v);
void write_f32(std::ostream& out, float v);
void write_f64(std::ostream& out, double v);
void write_magic(std::ostream& out, std::string_view magic);

std::uint8_t read_u8(std::istream& in);
std::uint32_t read_u32(std::istream& in);
float read_f32(std::istream& in);
double read_f64(std::istream& in);
/// Throws IoError when the next bytes do not spell `magic`.
void expect_magic(std::istream& in, std::string_view magic);

void write_f32_array(std::ostream& out, std::span<const double> values);
void read_f32_array(std::istream& in, std::span<double> values);

}  // namespace pnf::io
