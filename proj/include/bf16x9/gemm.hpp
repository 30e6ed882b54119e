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

// GEMM kernels: FP64 oracle, native FP32 reference and the BF16-triplet
// emulation (nine or six plane products, banded FP32 accumulation).
//
// Every kernel accumulates each output element over k in ascending order
// with one FMA per term, so results are bit-reproducible. Loops run
// i -> p -> j, which keeps that per-element order while letting the
// innermost j loop vectorize.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bf16x9/bf16.hpp"
#include "bf16x9/decompose.hpp"
#include "bf16x9/matrix.hpp"
#include "bf16x9/request.hpp"

namespace bf16x9 {

namespace detail {

template <typename T>
Matrix<T> gemm_fma(const GemmRequest& req, const Matrix<T>& a, const Matrix<T>& b, const Matrix<T>& c) {
  validate(req, a, b, c);
  const std::size_t m = req.m, n = req.n, k = req.k;
  const T alpha = static_cast<T>(req.alpha);
  const T beta = static_cast<T>(req.beta);
  Matrix<T> out(m, n);
  if (alpha == T{0}) {
    if (beta != T{0})
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = beta * c(i, j);
    return out;
  }

  Matrix<T> a_t, b_t;
  const Matrix<T>& opa = req.trans_a == Op::transpose ? (a_t = transposed(a)) : a;
  const Matrix<T>& opb = req.trans_b == Op::transpose ? (b_t = transposed(b)) : b;

  std::vector<T> acc(n);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(acc.begin(), acc.end(), T{0});
    T* __restrict accp = acc.data();
    for (std::size_t p = 0; p < k; ++p) {
      const T av = opa(i, p);
      const T* __restrict bp = opb.row(p).data();
      for (std::size_t j = 0; j < n; ++j) accp[j] = std::fma(av, bp[j], accp[j]);
    }
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = combine(alpha, acc[j], beta, beta != T{0} ? c(i, j) : T{0});
  }
  return out;
}

// acc <- scale * acc + a * b over widened planes. Widening is exact, so
// this is the same arithmetic as operating on the Bf16 values directly.
inline void scaled_accumulate(const MatrixF32& a, const MatrixF32& b, MatrixF32& acc, float scale) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  for (std::size_t i = 0; i < m; ++i) {
    float* __restrict accp = acc.row(i).data();
    if (scale != 1.0f)
      for (std::size_t j = 0; j < n; ++j) accp[j] *= scale;
    for (std::size_t p = 0; p < k; ++p) {
      const float av = a(i, p);
      const float* __restrict bp = b.row(p).data();
      for (std::size_t j = 0; j < n; ++j) accp[j] = std::fma(av, bp[j], accp[j]);
    }
  }
}

inline MatrixF32 widen_plane(const Matrix<Bf16>& plane) {
  MatrixF32 out(plane.rows(), plane.cols());
  auto src = plane.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = widen(src[i]);
  return out;
}

}  // namespace detail

/// FP64 oracle: C' = beta*C + alpha*op(A)*op(B) with FP64 FMAs.
inline MatrixF64 gemm_fp64(const GemmRequest& req, const MatrixF64& a, const MatrixF64& b,
                           const MatrixF64& c = {}) {
  return detail::gemm_fma(req, a, b, c);
}

/// Native FP32 SGEMM in software, same loop order as the oracle.
inline MatrixF32 gemm_fp32_native(const GemmRequest& req, const MatrixF32& a, const MatrixF32& b,
                                  const MatrixF32& c = {}) {
  return detail::gemm_fma(req, a, b, c);
}

/// Returns acc_scale * acc + Ai * Bj. BF16 pair products are exact in FP32
/// (8 + 8 significand bits) unless they underflow; each is fused into the
/// FP32 accumulator in ascending k. The scale applies to the incoming
/// accumulator once, modelling hardware scaled accumulation.
inline MatrixF32 gemm_bf16_product(const Matrix<Bf16>& ai, const Matrix<Bf16>& bj, MatrixF32 acc,
                                   float acc_scale) {
  if (ai.cols() != bj.rows() || acc.rows() != ai.rows() || acc.cols() != bj.cols())
    throw DimensionError("plane product dimensions do not match");
  detail::scaled_accumulate(detail::widen_plane(ai), detail::widen_plane(bj), acc, acc_scale);
  return acc;
}

/// Number of plane products per mode: 9 for bf16x9, 6 for bf16x6.
constexpr int plane_products(Mode mode) {
  switch (mode) {
    case Mode::bf16x9: return 9;
    case Mode::bf16x6: return 6;
    default: return 1;
  }
}

/// Emulated SGEMM. The triplet planes of op(A) and op(B) give nine products
/// A_i*B_j at scale 2^-8(i+j); products with equal i+j form a band. Bands
/// are accumulated least significant first,
///
///   D = P0 + 2^-8 (P1 + 2^-8 (P2 + 2^-8 (P3 + 2^-8 P4))),
///
/// into a single FP32 accumulator, scaling it by 2^-8 on entry to each new
/// band. Within a band the A-plane index ascends. bf16x6 keeps bands 0..2.
/// Output elements touching a NaN/Inf input are patched afterwards.
inline MatrixF32 gemm_emulated(const GemmRequest& req, const MatrixF32& a, const MatrixF32& b,
                               const MatrixF32& c = {}) {
  if (req.mode != Mode::bf16x9 && req.mode != Mode::bf16x6)
    throw std::invalid_argument("gemm_emulated requires mode bf16x9 or bf16x6");
  validate(req, a, b, c);
  const std::size_t m = req.m, n = req.n;
  if (req.alpha == 0.0f) return gemm_fp32_native(req, a, b, c);

  const DecomposedMatrix da = decompose_matrix(a, req.trans_a);
  const DecomposedMatrix db = decompose_matrix(b, req.trans_b);
  std::array<MatrixF32, 3> pa, pb;
  for (int s = 0; s < 3; ++s) {
    pa[s] = detail::widen_plane(da.triplets.planes[s]);
    pb[s] = detail::widen_plane(db.triplets.planes[s]);
  }

  const int top_band = req.mode == Mode::bf16x9 ? 4 : 2;
  MatrixF32 acc(m, n, 0.0f);
  for (int band = top_band; band >= 0; --band) {
    bool band_entry = band != top_band;
    for (int i = 0; i < 3; ++i) {
      const int j = band - i;
      if (j < 0 || j > 2) continue;
      detail::scaled_accumulate(pa[i], pb[j], acc, band_entry ? NumericConstants::scale_step : 1.0f);
      band_entry = false;
    }
  }

  MatrixF32 out(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = combine(req.alpha, acc(i, j), req.beta, req.beta != 0.0f ? c(i, j) : 0.0f);

  const PatchPlan plan = plan_patches(da.specials, db.specials, m, n);
  if (!plan.empty()) out = apply_patches(std::move(out), plan, a, b, c, req);
  return out;
}

struct FlopCount {
  std::uint64_t emulated_products = 0;
  std::uint64_t native_products = 0;
  double ratio = 1.0;
};

/// Multiply-adds: native = m*n*k; emulated = (plane products) * m*n*k.
inline FlopCount flop_count(const GemmRequest& req) {
  if (req.mode == Mode::auto_select) throw std::invalid_argument("flop_count needs a resolved mode");
  const std::uint64_t mnk = static_cast<std::uint64_t>(req.m) * req.n * req.k;
  const auto planes = static_cast<std::uint64_t>(plane_products(req.mode));
  return {planes * mnk, mnk, static_cast<double>(planes)};
}

}  // namespace bf16x9
