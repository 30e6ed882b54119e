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

// Splitting FP32 values into three scaled BF16 values,
//
//   x = hi + 2^-8 * mid + 2^-16 * lo,
//
// together with the special-value policy used by the emulated GEMM:
// NaN poisons all three components, +-Inf saturates to a triplet of
// +-BF16MAXFINITE (which recomposes to +-FP32MAXFINITE), and output
// elements that depend on a NaN/Inf input are recomputed afterwards.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "bf16x9/bf16.hpp"
#include "bf16x9/matrix.hpp"
#include "bf16x9/request.hpp"

namespace bf16x9 {

struct Triplet {
  Bf16 hi;
  Bf16 mid;
  Bf16 lo;

  friend constexpr bool operator==(const Triplet&, const Triplet&) = default;
};

namespace detail {

// RNE onto the BF16 grid, but a finite input never becomes Inf: anything
// that would round past BF16MAXFINITE is clamped to it. Only matters for
// |x| > (2 - 2^-8) * 2^127; the residual then carries the excess.
constexpr Bf16 round_to_bf16_saturating(float x) {
  const Bf16 r = round_to_bf16(x);
  if (r.is_inf() && (fp32_bits(x) & 0x7FFFFFFFu) != 0x7F800000u)
    return r.sign() ? -kBf16MaxFinite : kBf16MaxFinite;
  return r;
}

}  // namespace detail

/// Lossless for every finite FP32 value, subnormals included. Residuals are
/// formed in FP32 and are exact: each step removes the top 8 significand
/// bits, and scaling by 2^8 / 2^16 is exact in this range.
constexpr Triplet decompose_fp32(float x) {
  const std::uint32_t mag = fp32_bits(x) & 0x7FFFFFFFu;
  if (mag > 0x7F800000u) {
    const Bf16 nan{static_cast<std::uint16_t>(((fp32_bits(x) >> 16) & 0x8000u) | kBf16QuietNaN.bits)};
    return {nan, nan, nan};
  }
  if (mag == 0x7F800000u) {
    const Bf16 sat = x < 0 ? -kBf16MaxFinite : kBf16MaxFinite;
    return {sat, sat, sat};
  }
  const Bf16 hi = detail::round_to_bf16_saturating(x);
  const float r1 = x - widen(hi);
  const Bf16 mid = detail::round_to_bf16_saturating(r1 * 0x1p8f);
  const float r2 = r1 - widen(mid) * 0x1p-8f;
  const Bf16 lo = detail::round_to_bf16_saturating(r2 * 0x1p16f);
  return {hi, mid, lo};
}

/// widen(hi) + 2^-8*widen(mid) + 2^-16*widen(lo), left to right in FP32.
/// A zero sum keeps the sign of hi, so -0 survives the round trip.
constexpr float recompose(const Triplet& t) {
  const float head = widen(t.hi) + widen(t.mid) * 0x1p-8f;
  const float sum = head + widen(t.lo) * 0x1p-16f;
  return sum == 0.0f ? widen(t.hi) : sum;
}

struct TripletMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::array<Matrix<Bf16>, 3> planes;  // hi, mid, lo

  Triplet at(std::size_t r, std::size_t c) const {
    return {planes[0](r, c), planes[1](r, c), planes[2](r, c)};
  }
};

struct Position {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
};

struct SignedPosition {
  std::size_t row = 0;
  std::size_t col = 0;
  bool negative = false;
  friend bool operator==(const SignedPosition&, const SignedPosition&) = default;
};

/// NaN and Inf coordinates of op(M), in row-major scan order.
struct SpecialValueReport {
  std::vector<Position> nan_positions;
  std::vector<SignedPosition> inf_positions;

  bool empty() const { return nan_positions.empty() && inf_positions.empty(); }
};

struct DecomposedMatrix {
  TripletMatrix triplets;
  SpecialValueReport specials;
};

inline DecomposedMatrix decompose_matrix(const MatrixF32& m, Op op = Op::none) {
  DecomposedMatrix out;
  const std::size_t rows = op_rows(m, op);
  const std::size_t cols = op_cols(m, op);
  if (rows == 0 || cols == 0) return out;
  auto& t = out.triplets;
  t.rows = rows;
  t.cols = cols;
  for (auto& p : t.planes) p = Matrix<Bf16>(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const float x = op == Op::transpose ? m(c, r) : m(r, c);
      const Triplet tr = decompose_fp32(x);
      t.planes[0](r, c) = tr.hi;
      t.planes[1](r, c) = tr.mid;
      t.planes[2](r, c) = tr.lo;
      if (std::isnan(x)) {
        out.specials.nan_positions.push_back({r, c});
      } else if (std::isinf(x)) {
        out.specials.inf_positions.push_back({r, c, x < 0});
      }
    }
  }
  return out;
}

/// Output coordinates of an m x n result that depend on a special input:
/// every row of op(A) holding a NaN/Inf and every such column of op(B).
/// Stored as row/column flags; entries() expands the union.
class PatchPlan {
 public:
  PatchPlan() = default;
  PatchPlan(std::size_t m, std::size_t n) : rows_(m, false), cols_(n, false) {}

  void flag_row(std::size_t i) { rows_.at(i) = true; }
  void flag_col(std::size_t j) { cols_.at(j) = true; }

  bool contains(std::size_t i, std::size_t j) const { return rows_[i] || cols_[j]; }
  bool empty() const {
    for (bool b : rows_) if (b) return false;
    for (bool b : cols_) if (b) return false;
    return true;
  }

  std::vector<Position> entries() const {
    std::vector<Position> out;
    for (std::size_t i = 0; i < rows_.size(); ++i)
      for (std::size_t j = 0; j < cols_.size(); ++j)
        if (contains(i, j)) out.push_back({i, j});
    return out;
  }

 private:
  std::vector<bool> rows_;
  std::vector<bool> cols_;
};

inline PatchPlan plan_patches(const SpecialValueReport& ra, const SpecialValueReport& rb,
                              std::size_t m, std::size_t n) {
  PatchPlan plan(m, n);
  for (const auto& p : ra.nan_positions) plan.flag_row(p.row);
  for (const auto& p : ra.inf_positions) plan.flag_row(p.row);
  for (const auto& p : rb.nan_positions) plan.flag_col(p.col);
  for (const auto& p : rb.inf_positions) plan.flag_col(p.col);
  return plan;
}

namespace detail {

template <typename T>
T op_at(const Matrix<T>& m, Op op, std::size_t r, std::size_t c) {
  return op == Op::transpose ? m(c, r) : m(r, c);
}

}  // namespace detail

/// Recomputes every planned element with a scalar FP32 dot product (FMA,
/// ascending k) and the usual epilogue, so NaN/Inf come out IEEE-correct.
inline MatrixF32 apply_patches(MatrixF32 result, const PatchPlan& plan, const MatrixF32& a,
                               const MatrixF32& b, const MatrixF32& c, const GemmRequest& req) {
  for (const auto& [i, j] : plan.entries()) {
    float cij = req.beta != 0.0f ? c(i, j) : 0.0f;
    if (req.alpha == 0.0f) {
      result(i, j) = req.beta != 0.0f ? req.beta * cij : 0.0f;
      continue;
    }
    float acc = 0.0f;
    for (std::size_t p = 0; p < req.k; ++p)
      acc = std::fma(detail::op_at(a, req.trans_a, i, p), detail::op_at(b, req.trans_b, p, j), acc);
    result(i, j) = combine(req.alpha, acc, req.beta, cij);
  }
  return result;
}

}  // namespace bf16x9
