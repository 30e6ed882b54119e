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

#include "bf16x9/decompose.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <limits>

#include "bf16x9/gemm.hpp"
#include "bf16x9/random.hpp"
#include "oracles.hpp"

namespace bf16x9 {
namespace {

constexpr float kInfF = std::numeric_limits<float>::infinity();
const float kNaNF = std::numeric_limits<float>::quiet_NaN();

Triplet values(float hi, float mid, float lo) {
  return {round_to_bf16(hi), round_to_bf16(mid), round_to_bf16(lo)};
}

TEST(DecomposeFp32, Examples) {
  EXPECT_EQ(decompose_fp32(1.0f), values(1.0f, 0.0f, 0.0f));
  // hi rounds up to 2, the signed correction carries the deficit.
  EXPECT_EQ(decompose_fp32(2.0f - 0x1p-23f), values(2.0f, -0x1p-15f, 0.0f));
  // The smallest FP32 subnormal lives entirely in the lo plane.
  EXPECT_EQ(decompose_fp32(0x1p-149f), values(0.0f, 0.0f, 0x1p-133f));
  const Triplet inf = decompose_fp32(kInfF);
  EXPECT_EQ(inf, (Triplet{kBf16MaxFinite, kBf16MaxFinite, kBf16MaxFinite}));
  const Triplet ninf = decompose_fp32(-kInfF);
  EXPECT_EQ(ninf, (Triplet{-kBf16MaxFinite, -kBf16MaxFinite, -kBf16MaxFinite}));
}

TEST(DecomposeFp32, ExamplesAgreeWithOracle) {
  for (float x : {1.0f, 2.0f - 0x1p-23f, 0x1p-149f, 1.0f + 0x1p-20f}) {
    const auto o = oracle::split(x);
    const Triplet t = decompose_fp32(x);
    EXPECT_EQ(t.hi.bits, o.hi) << x;
    EXPECT_EQ(t.mid.bits, o.mid) << x;
    EXPECT_EQ(t.lo.bits, o.lo) << x;
  }
}

TEST(DecomposeFp32, NaNPoisonsAllComponents) {
  for (std::uint32_t bits : {0x7FC00000u, 0x7F800001u, 0xFFFFFFFFu, 0xFFC00123u}) {
    const Triplet t = decompose_fp32(fp32_from_bits(bits));
    EXPECT_TRUE(t.hi.is_nan());
    EXPECT_TRUE(t.mid.is_nan());
    EXPECT_TRUE(t.lo.is_nan());
    EXPECT_TRUE(std::isnan(recompose(t)));
  }
}

TEST(Recompose, Examples) {
  EXPECT_EQ(recompose(values(1.0f, 0.0f, 0.0f)), 1.0f);
  // (2 - 2^-7)(1 + 2^-8 + 2^-16) = 2 - 2^-23 exactly.
  EXPECT_EQ(recompose({kBf16MaxFinite, kBf16MaxFinite, kBf16MaxFinite}), kFp32MaxFiniteValue);
  EXPECT_EQ(recompose(values(0.0f, 0.0f, 0x1p-133f)), 0x1p-149f);
  EXPECT_EQ(recompose(decompose_fp32(-kInfF)), -kFp32MaxFiniteValue);
}

TEST(DecomposeFp32, MatchesOracleOnRandomPatterns) {
  Rng rng(101);
  for (int i = 0; i < 2'000'000; ++i) {
    const float x = fp32_from_bits(rng.next_u32());
    if (!std::isfinite(x)) continue;
    const auto o = oracle::split(x);
    const Triplet t = decompose_fp32(x);
    ASSERT_EQ(t.hi.bits, o.hi) << std::hex << fp32_bits(x);
    ASSERT_EQ(t.mid.bits, o.mid) << std::hex << fp32_bits(x);
    ASSERT_EQ(t.lo.bits, o.lo) << std::hex << fp32_bits(x);
  }
}

TEST(DecomposeFp32, LosslessOnAllSubnormals) {
  for (std::uint32_t man = 1; man < (1u << 23); ++man) {
    for (std::uint32_t sign : {0u, 0x80000000u}) {
      const std::uint32_t bits = sign | man;
      ASSERT_EQ(fp32_bits(recompose(decompose_fp32(fp32_from_bits(bits)))), bits) << std::hex << bits;
    }
  }
}

TEST(DecomposeFp32, LosslessAtTheTopOfTheRange) {
  // Everything that would round past BF16MAXFINITE, where the split saturates.
  for (std::uint32_t bits = 0x7F7F0000u; bits < 0x7F800000u; ++bits) {
    ASSERT_EQ(fp32_bits(recompose(decompose_fp32(fp32_from_bits(bits)))), bits) << std::hex << bits;
    const auto o = oracle::split(fp32_from_bits(bits));
    ASSERT_EQ(decompose_fp32(fp32_from_bits(bits)).mid.bits, o.mid) << std::hex << bits;
  }
  EXPECT_EQ(decompose_fp32(kFp32MaxFiniteValue), (Triplet{kBf16MaxFinite, kBf16MaxFinite, kBf16MaxFinite}));
}

TEST(DecomposeFp32, LosslessOnRandomFinitePatterns) {
  Rng rng(103);
  for (int i = 0; i < 4'000'000; ++i) {
    const std::uint32_t bits = rng.next_u32();
    if (!std::isfinite(fp32_from_bits(bits))) continue;
    ASSERT_EQ(fp32_bits(recompose(decompose_fp32(fp32_from_bits(bits)))), bits) << std::hex << bits;
  }
}

TEST(DecomposeFp32, SignSymmetry) {
  Rng rng(107);
  for (int i = 0; i < 1'000'000; ++i) {
    const float x = fp32_from_bits(rng.next_u32());
    if (!std::isfinite(x)) continue;
    const Triplet p = decompose_fp32(x);
    const Triplet n = decompose_fp32(-x);
    ASSERT_EQ(widen(n.hi), -widen(p.hi));
    ASSERT_EQ(widen(n.mid), -widen(p.mid));
    ASSERT_EQ(widen(n.lo), -widen(p.lo));
  }
}

TEST(DecomposeMatrix, IdentityHasEmptyLowerPlanes) {
  const auto d = decompose_matrix(MatrixF32::identity(2));
  EXPECT_EQ(d.triplets.rows, 2u);
  EXPECT_EQ(d.triplets.cols, 2u);
  EXPECT_EQ(d.triplets.planes[0], (Matrix<Bf16>{{Bf16{0x3F80}, Bf16{}}, {Bf16{}, Bf16{0x3F80}}}));
  EXPECT_EQ(d.triplets.planes[1], Matrix<Bf16>(2, 2));
  EXPECT_EQ(d.triplets.planes[2], Matrix<Bf16>(2, 2));
  EXPECT_TRUE(d.specials.empty());
}

TEST(DecomposeMatrix, ReportsNaNPositions) {
  MatrixF32 m(2, 2, 1.0f);
  m(0, 1) = kNaNF;
  const auto d = decompose_matrix(m);
  ASSERT_EQ(d.specials.nan_positions.size(), 1u);
  EXPECT_EQ(d.specials.nan_positions[0], (Position{0, 1}));
  EXPECT_TRUE(d.specials.inf_positions.empty());
}

TEST(DecomposeMatrix, ReportUsesOpAdjustedOrientation) {
  MatrixF32 m(2, 3, 1.0f);
  m(0, 2) = -kInfF;
  const auto d = decompose_matrix(m, Op::transpose);
  EXPECT_EQ(d.triplets.rows, 3u);
  EXPECT_EQ(d.triplets.cols, 2u);
  ASSERT_EQ(d.specials.inf_positions.size(), 1u);
  EXPECT_EQ(d.specials.inf_positions[0], (SignedPosition{2, 0, true}));
  EXPECT_EQ(d.triplets.at(2, 0).hi, -kBf16MaxFinite);
}

TEST(DecomposeMatrix, SingleElementSplit) {
  const auto d = decompose_matrix(MatrixF32{{1.0f + 0x1p-20f}});
  EXPECT_EQ(d.triplets.at(0, 0), values(1.0f, 0x1p-12f, 0.0f));
}

TEST(DecomposeMatrix, EmptyMatrixGivesEmptyResult) {
  const auto d = decompose_matrix(MatrixF32{});
  EXPECT_EQ(d.triplets.rows, 0u);
  EXPECT_TRUE(d.specials.empty());
}

TEST(PlanPatches, Examples) {
  EXPECT_TRUE(plan_patches({}, {}, 3, 3).empty());

  SpecialValueReport ra;
  ra.nan_positions.push_back({2, 5});
  EXPECT_EQ(plan_patches(ra, {}, 3, 4).entries(),
            (std::vector<Position>{{2, 0}, {2, 1}, {2, 2}, {2, 3}}));

  SpecialValueReport a_inf, b_nan;
  a_inf.inf_positions.push_back({0, 0, false});
  b_nan.nan_positions.push_back({1, 1});
  EXPECT_EQ(plan_patches(a_inf, b_nan, 2, 2).entries(), (std::vector<Position>{{0, 0}, {0, 1}, {1, 1}}));
}

TEST(ApplyPatches, EmptyPlanLeavesResultUntouched) {
  const MatrixF32 c{{1.0f, 2.0f}};
  GemmRequest req{1, 2, 1};
  EXPECT_EQ(apply_patches(c, PatchPlan(1, 2), MatrixF32{{1.0f}}, MatrixF32{{1.0f, 1.0f}}, {}, req), c);
}

TEST(ApplyPatches, InfinityAndInfMinusInf) {
  GemmRequest req{1, 1, 2};
  PatchPlan plan(1, 1);
  plan.flag_row(0);
  const MatrixF32 b{{1.0f}, {1.0f}};
  const MatrixF32 stale{{123.0f}};
  const MatrixF32 pos = apply_patches(stale, plan, MatrixF32{{kInfF, kInfF}}, b, {}, req);
  EXPECT_EQ(pos(0, 0), kInfF);
  const MatrixF32 nan = apply_patches(stale, plan, MatrixF32{{kInfF, -kInfF}}, b, {}, req);
  EXPECT_TRUE(std::isnan(nan(0, 0)));
}

TEST(ApplyPatches, HonoursTransposeAndEpilogue) {
  GemmRequest req{1, 1, 2, Op::transpose, Op::none, 2.0f, 1.0f};
  PatchPlan plan(1, 1);
  plan.flag_col(0);
  const MatrixF32 a{{kInfF}, {1.0f}};  // op(A) = [Inf, 1]
  const MatrixF32 out = apply_patches(MatrixF32{{0.0f}}, plan, a, MatrixF32{{1.0f}, {1.0f}}, MatrixF32{{5.0f}}, req);
  EXPECT_EQ(out(0, 0), kInfF);
}

// Every output element that depends on a NaN input must come out NaN.
TEST(Patching, NaNReachesEveryDependentOutput) {
  Rng rng(109);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 5 + rng.index(6), k = 3 + rng.index(8), n = 4 + rng.index(6);
    MatrixF32 a = random_normal_f32(m, k, rng.next_u64());
    MatrixF32 b = random_normal_f32(k, n, rng.next_u64());
    const std::size_t ar = rng.index(m), ac = rng.index(k), br = rng.index(k), bc = rng.index(n);
    a(ar, ac) = kNaNF;
    b(br, bc) = kNaNF;
    for (Mode mode : {Mode::bf16x9, Mode::bf16x6}) {
      GemmRequest req{m, n, k};
      req.mode = mode;
      const MatrixF32 out = gemm_emulated(req, a, b);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i == ar || j == bc) {
            ASSERT_TRUE(std::isnan(out(i, j)));
          } else {
            ASSERT_TRUE(std::isfinite(out(i, j)));
          }
    }
  }
}

}  // namespace
}  // namespace bf16x9
