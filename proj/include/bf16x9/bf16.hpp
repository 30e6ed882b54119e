// Copyright 2026 The bf16x9 Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Software bfloat16: conversion from FP32 with round-to-nearest-even,
// exact widening back to FP32, and IEEE-754 classification. No hardware
// BF16 support is assumed; everything is done on bit patterns.
//
// Memory layout of a Bf16 (MSB first):
//   [15]    sign
//   [14:7]  exponent (8 bits, bias 127, same as FP32)
//   [6:0]   mantissa (7 explicit bits)

#include <bit>
#include <cstdint>
#include <ostream>

namespace bf16x9 {

struct Bf16 {
  std::uint16_t bits = 0;

  static constexpr Bf16 from_bits(std::uint16_t b) { return Bf16{b}; }

  constexpr bool sign() const { return (bits & 0x8000u) != 0; }
  constexpr std::uint16_t exponent_field() const { return (bits >> 7) & 0xFFu; }
  constexpr std::uint16_t mantissa_field() const { return bits & 0x7Fu; }

  constexpr bool is_nan() const { return exponent_field() == 0xFF && mantissa_field() != 0; }
  constexpr bool is_inf() const { return exponent_field() == 0xFF && mantissa_field() == 0; }

  constexpr Bf16 operator-() const { return Bf16{static_cast<std::uint16_t>(bits ^ 0x8000u)}; }

  friend constexpr bool operator==(Bf16, Bf16) = default;
};

inline std::ostream& operator<<(std::ostream& os, Bf16 b) {
  const auto flags = os.flags();
  os << "Bf16(0x" << std::hex << b.bits << ')';
  os.flags(flags);
  return os;
}

/// FP32 unit roundoff, 8-bit split step and number of split levels.
struct NumericConstants {
  static constexpr float mu_fp32 = 0x1p-24f;
  static constexpr float scale_step = 0x1p-8f;
  static constexpr int num_scales = 3;
};
static_assert(8 * NumericConstants::num_scales == 24);

inline constexpr Bf16 kBf16MaxFinite{0x7F7F};
inline constexpr Bf16 kBf16Inf{0x7F80};
inline constexpr Bf16 kBf16QuietNaN{0x7FC0};
inline constexpr float kBf16MaxFiniteValue = 0x1.FEp127f;  // (2 - 2^-7) * 2^127
inline constexpr float kFp32MaxFiniteValue = 0x1.FFFFFEp127f;  // (2 - 2^-23) * 2^127
inline constexpr float kBf16MinSubnormal = 0x1p-133f;
inline constexpr float kBf16MinNormal = 0x1p-126f;

constexpr std::uint32_t fp32_bits(float x) { return std::bit_cast<std::uint32_t>(x); }
constexpr float fp32_from_bits(std::uint32_t u) { return std::bit_cast<float>(u); }

/// Exact widening: a Bf16 is the upper half of an FP32 pattern.
constexpr float widen(Bf16 b) { return fp32_from_bits(static_cast<std::uint32_t>(b.bits) << 16); }

/// Round-to-nearest-even onto the BF16 grid, subnormals included. Values
/// beyond BF16MAXFINITE by at least half an ulp become Inf. NaNs map to one
/// canonical quiet NaN per sign.
constexpr Bf16 round_to_bf16(float x) {
  std::uint32_t u = fp32_bits(x);
  if ((u & 0x7FFFFFFFu) > 0x7F800000u) {
    return Bf16{static_cast<std::uint16_t>(((u >> 16) & 0x8000u) | kBf16QuietNaN.bits)};
  }
  // Adding 0x7FFF plus the kept LSB carries into the upper half exactly
  // when the discarded half exceeds the tie point, or equals it with an
  // odd kept LSB. A carry out of the mantissa bumps the exponent, which
  // is the correct next representable value (up to Inf).
  u += 0x7FFFu + ((u >> 16) & 1u);
  return Bf16{static_cast<std::uint16_t>(u >> 16)};
}

enum class FpClass { zero, subnormal, normal, inf, nan };

constexpr FpClass classify(float x) {
  const std::uint32_t u = fp32_bits(x);
  const std::uint32_t exp = (u >> 23) & 0xFFu;
  const std::uint32_t man = u & 0x7FFFFFu;
  if (exp == 0) return man == 0 ? FpClass::zero : FpClass::subnormal;
  if (exp == 0xFF) return man == 0 ? FpClass::inf : FpClass::nan;
  return FpClass::normal;
}

constexpr const char* to_string(FpClass c) {
  switch (c) {
    case FpClass::zero: return "zero";
    case FpClass::subnormal: return "subnormal";
    case FpClass::normal: return "normal";
    case FpClass::inf: return "inf";
    case FpClass::nan: return "nan";
  }
  return "?";
}

}  // namespace bf16x9
