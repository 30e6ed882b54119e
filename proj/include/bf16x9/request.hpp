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

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "bf16x9/matrix.hpp"

namespace bf16x9 {

enum class Mode { native_fp32, bf16x9, bf16x6, fp64_oracle, auto_select };

constexpr std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::native_fp32: return "native_fp32";
    case Mode::bf16x9: return "bf16x9";
    case Mode::bf16x6: return "bf16x6";
    case Mode::fp64_oracle: return "fp64_oracle";
    case Mode::auto_select: return "auto";
  }
  return "?";
}

/// Accepts the canonical names plus the short aliases used on the command
/// line and in GEMM_EMULATION_MODE ("native", "fp32", "fp64").
inline std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "native_fp32" || s == "native" || s == "fp32") return Mode::native_fp32;
  if (s == "bf16x9") return Mode::bf16x9;
  if (s == "bf16x6") return Mode::bf16x6;
  if (s == "fp64_oracle" || s == "fp64") return Mode::fp64_oracle;
  if (s == "auto") return Mode::auto_select;
  return std::nullopt;
}

/// C <- beta*C + alpha*op(A)*op(B), op(A) is m x k, op(B) is k x n.
struct GemmRequest {
  std::size_t m = 1;
  std::size_t n = 1;
  std::size_t k = 1;
  Op trans_a = Op::none;
  Op trans_b = Op::none;
  float alpha = 1.0f;
  float beta = 0.0f;
  Mode mode = Mode::native_fp32;
};

/// Throws DimensionError unless A, B and C fit the request. C may be empty
/// when beta == 0 (it is never read in that case).
template <typename T>
void validate(const GemmRequest& req, const Matrix<T>& a, const Matrix<T>& b, const Matrix<T>& c) {
  if (req.m == 0 || req.n == 0 || req.k == 0) throw DimensionError("gemm dimensions must be >= 1");
  if (op_rows(a, req.trans_a) != req.m || op_cols(a, req.trans_a) != req.k)
    throw DimensionError("op(A) is not m x k");
  if (op_rows(b, req.trans_b) != req.k || op_cols(b, req.trans_b) != req.n)
    throw DimensionError("op(B) is not k x n");
  const bool c_needed = req.beta != 0.0f;
  if ((c_needed || !c.empty()) && (c.rows() != req.m || c.cols() != req.n))
    throw DimensionError("C is not m x n");
}

/// Epilogue shared by every kernel: one FMA per element, alpha*D + (beta*C).
template <typename T>
T combine(T alpha, T d, T beta, T c) {
  if (beta == T{0}) return alpha * d;
  return std::fma(alpha, d, beta * c);
}

}  // namespace bf16x9
