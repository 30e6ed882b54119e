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

// Resolution of Mode::auto_select. A two-term roofline decides whether the
// emulated kernel is predicted to beat native FP32; small-k and small-output
// calls always stay native. The process-wide policy is read once from
//
//   GEMM_EMULATION_MODE   auto | native | bf16x9 | bf16x6  (unset: native)
//   GEMM_EMULATION_MIN_K  positive integer
//
// Emulation is opt-in: without GEMM_EMULATION_MODE every auto request runs
// native FP32.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bf16x9/gemm.hpp"
#include "bf16x9/matrix.hpp"
#include "bf16x9/request.hpp"

namespace bf16x9 {

inline constexpr const char* kModeEnvVar = "GEMM_EMULATION_MODE";
inline constexpr const char* kMinKEnvVar = "GEMM_EMULATION_MIN_K";

struct CostParams {
  double native_flops_per_unit = 1.0;
  double bf16_flops_per_unit = 28.0;  // BF16 MMA peak vs FP32 peak on GB200
  double bytes_per_unit = 0.1;
};

struct DispatchPolicy {
  std::size_t min_k = 16;
  std::size_t min_mn = 4096;
  std::optional<Mode> forced_mode;
  CostParams cost_params;

  void check() const {
    if (min_k < 1 || min_mn < 1) throw std::invalid_argument("dispatch thresholds must be >= 1");
    if (!(cost_params.native_flops_per_unit > 0) || !(cost_params.bf16_flops_per_unit > 0) ||
        !(cost_params.bytes_per_unit > 0))
      throw std::invalid_argument("cost parameters must be positive");
    if (forced_mode == Mode::auto_select) throw std::invalid_argument("forced mode cannot be auto");
  }

  /// Builds a policy from an environment lookup (getenv-shaped: returns
  /// nullptr when unset). Unknown values fall back to the defaults.
  static DispatchPolicy from_environment(const std::function<const char*(const char*)>& lookup) {
    DispatchPolicy p;
    p.forced_mode = Mode::native_fp32;
    if (const char* mode = lookup(kModeEnvVar)) {
      const auto parsed = parse_mode(mode);
      if (parsed == Mode::auto_select) {
        p.forced_mode.reset();
      } else if (parsed == Mode::native_fp32 || parsed == Mode::bf16x9 || parsed == Mode::bf16x6) {
        p.forced_mode = parsed;
      }
    }
    if (const char* min_k = lookup(kMinKEnvVar)) {
      const std::string_view s(min_k);
      std::size_t value = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec == std::errc() && ptr == s.data() + s.size() && value >= 1) p.min_k = value;
    }
    return p;
  }
};

/// Read from the process environment on first use and cached.
inline const DispatchPolicy& process_policy() {
  static const DispatchPolicy policy =
      DispatchPolicy::from_environment([](const char* name) { return std::getenv(name); });
  return policy;
}

struct CostEstimate {
  double native_time_units = 0;
  double emulated_time_units = 0;
};

/// time = max(compute, memory). Native moves A, B and C (read + write) once;
/// the emulated path also writes and re-reads the BF16 planes, modelled as
/// three times the operand traffic, and does 9x the multiply-adds at the
/// BF16 rate.
inline CostEstimate predict_cost(const GemmRequest& req, const DispatchPolicy& policy) {
  const auto& cp = policy.cost_params;
  const double m = static_cast<double>(req.m);
  const double n = static_cast<double>(req.n);
  const double k = static_cast<double>(req.k);
  const double mnk = m * n * k;
  const double operand_bytes = 4.0 * (m * k + k * n);
  const double output_bytes = 8.0 * m * n;

  const double native_compute = mnk / cp.native_flops_per_unit;
  const double native_memory = (operand_bytes + output_bytes) / cp.bytes_per_unit;
  const double emulated_compute = 9.0 * mnk / cp.bf16_flops_per_unit;
  const double emulated_memory = (3.0 * operand_bytes + output_bytes) / cp.bytes_per_unit;
  return {std::max(native_compute, native_memory), std::max(emulated_compute, emulated_memory)};
}

/// Forced mode wins; otherwise bf16x9 iff k and m*n clear the thresholds
/// and the cost model favours emulation. Requests that already name a
/// concrete mode are returned unchanged.
inline Mode select_mode(const GemmRequest& req, const DispatchPolicy& policy) {
  if (req.mode != Mode::auto_select) return req.mode;
  if (policy.forced_mode) return *policy.forced_mode;
  if (req.k < policy.min_k || req.m * req.n < policy.min_mn) return Mode::native_fp32;
  const CostEstimate cost = predict_cost(req, policy);
  return cost.emulated_time_units < cost.native_time_units ? Mode::bf16x9 : Mode::native_fp32;
}

struct GemmResult {
  MatrixF32 c;
  Mode resolved = Mode::native_fp32;
};

/// Drop-in SGEMM entry point: resolves auto, then runs the chosen kernel.
/// fp64_oracle computes in FP64 and rounds the result to FP32.
inline GemmResult sgemm(GemmRequest req, const MatrixF32& a, const MatrixF32& b, const MatrixF32& c = {},
                        const DispatchPolicy& policy = process_policy()) {
  req.mode = select_mode(req, policy);
  switch (req.mode) {
    case Mode::bf16x9:
    case Mode::bf16x6:
      return {gemm_emulated(req, a, b, c), req.mode};
    case Mode::fp64_oracle:
      return {convert<float>(gemm_fp64(req, convert<double>(a), convert<double>(b), convert<double>(c))),
              req.mode};
    default:
      return {gemm_fp32_native(req, a, b, c), Mode::native_fp32};
  }
}

}  // namespace bf16x9
