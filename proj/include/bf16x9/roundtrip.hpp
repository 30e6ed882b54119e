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

// Verification of decompose/recompose over FP32 bit patterns. Finite
// patterns must round-trip bit-exactly; NaNs must stay NaN in all three
// components; infinities must saturate to +-FP32MAXFINITE.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "bf16x9/bf16.hpp"
#include "bf16x9/decompose.hpp"
#include "bf16x9/random.hpp"

namespace bf16x9 {

struct RoundtripSummary {
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
  std::uint64_t zero = 0;
  std::uint64_t subnormal = 0;
  std::uint64_t normal = 0;
  std::uint64_t inf = 0;
  std::uint64_t nan = 0;
  std::optional<std::uint32_t> first_failure;

  std::uint64_t finite() const { return zero + subnormal + normal; }

  void merge(const RoundtripSummary& o) {
    checked += o.checked;
    failures += o.failures;
    zero += o.zero;
    subnormal += o.subnormal;
    normal += o.normal;
    inf += o.inf;
    nan += o.nan;
    if (o.first_failure && (!first_failure || *o.first_failure < *first_failure)) first_failure = o.first_failure;
  }
};

/// True when the pattern satisfies the policy for its class.
constexpr bool roundtrip_ok(std::uint32_t bits) {
  const float x = fp32_from_bits(bits);
  const Triplet t = decompose_fp32(x);
  const float back = recompose(t);
  switch (classify(x)) {
    case FpClass::nan:
      return t.hi.is_nan() && t.mid.is_nan() && t.lo.is_nan() && back != back;
    case FpClass::inf:
      return back == (x < 0 ? -kFp32MaxFiniteValue : kFp32MaxFiniteValue);
    default:
      return fp32_bits(back) == bits;
  }
}

inline void roundtrip_record(RoundtripSummary& s, std::uint32_t bits) {
  ++s.checked;
  switch (classify(fp32_from_bits(bits))) {
    case FpClass::zero: ++s.zero; break;
    case FpClass::subnormal: ++s.subnormal; break;
    case FpClass::normal: ++s.normal; break;
    case FpClass::inf: ++s.inf; break;
    case FpClass::nan: ++s.nan; break;
  }
  if (!roundtrip_ok(bits)) {
    ++s.failures;
    if (!s.first_failure || bits < *s.first_failure) s.first_failure = bits;
  }
}

/// Patterns in [begin, end).
inline RoundtripSummary roundtrip_range(std::uint64_t begin, std::uint64_t end) {
  RoundtripSummary s;
  for (std::uint64_t u = begin; u < end; ++u) roundtrip_record(s, static_cast<std::uint32_t>(u));
  return s;
}

/// All 2^32 patterns, split across `threads` workers.
inline RoundtripSummary roundtrip_exhaustive(unsigned threads = 1) {
  constexpr std::uint64_t total = 1ull << 32;
  threads = std::max(1u, threads);
  std::vector<RoundtripSummary> parts(threads);
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t begin = total * t / threads;
      const std::uint64_t end = total * (t + 1) / threads;
      workers.emplace_back([&parts, t, begin, end] { parts[t] = roundtrip_range(begin, end); });
    }
  }
  RoundtripSummary s;
  for (const auto& p : parts) s.merge(p);
  return s;
}

/// `count` uniformly drawn patterns; the sequence depends only on `seed`.
inline RoundtripSummary roundtrip_sample(std::uint64_t count, std::uint64_t seed) {
  Rng rng(seed);
  RoundtripSummary s;
  for (std::uint64_t i = 0; i < count; ++i) roundtrip_record(s, rng.next_u32());
  return s;
}

}  // namespace bf16x9
