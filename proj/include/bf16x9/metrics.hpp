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

// Error metrics against an FP64 reference: per-element dot-product
// condition numbers, componentwise relative error, and the energy
// normalized RMS error with its SNR in dB.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>

#include "bf16x9/matrix.hpp"

namespace bf16x9 {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// ||x|| * ||y|| / |x.y|, i.e. sec of the angle between x and y. Infinite
/// when the vectors are orthogonal.
inline double dot_condition(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("dot_condition: length mismatch");
  double xx = 0, yy = 0, xy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx = std::fma(x[i], x[i], xx);
    yy = std::fma(y[i], y[i], yy);
    xy = std::fma(x[i], y[i], xy);
  }
  if (xy == 0.0) return kInf;
  return std::sqrt(xx) * std::sqrt(yy) / std::abs(xy);
}

struct ConditionField {
  MatrixF64 kappa;
  double average = 0;  // mean over finite entries
};

/// kappa(i, j) for every dot product row_i(A) . col_j(B), in FP64.
inline ConditionField condition_field(const MatrixF64& a, const MatrixF64& b) {
  if (a.cols() != b.rows()) throw DimensionError("condition_field: inner dimensions differ");
  const std::size_t m = a.rows(), n = b.cols();
  const MatrixF64 bt = transposed(b);
  ConditionField f{MatrixF64(m, n), 0.0};
  double sum = 0;
  std::size_t finite = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double kij = dot_condition(a.row(i), bt.row(j));
      f.kappa(i, j) = kij;
      if (std::isfinite(kij)) {
        sum += kij;
        ++finite;
      }
    }
  }
  f.average = finite ? sum / static_cast<double>(finite) : kInf;
  return f;
}

struct ErrorStats {
  double avg = 0;
  double max = 0;
  MatrixF64 per_element;  // NaN where the reference is zero
  std::size_t excluded = 0;
};

inline double relative_error(float test, double ref) {
  if (!std::isfinite(test)) return kInf;
  return std::abs(static_cast<double>(test) - ref) / std::abs(ref);
}

/// |test - ref| / |ref| per element, in FP64. Zero reference entries are
/// excluded from avg/max and counted in `excluded`.
inline ErrorStats relative_error_stats(const MatrixF32& test, const MatrixF64& ref) {
  if (test.rows() != ref.rows() || test.cols() != ref.cols())
    throw DimensionError("relative_error_stats: shape mismatch");
  ErrorStats s;
  s.per_element = MatrixF64(ref.rows(), ref.cols(), std::numeric_limits<double>::quiet_NaN());
  auto t = test.values();
  auto r = ref.values();
  auto e = s.per_element.values();
  double sum = 0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] == 0.0) {
      ++s.excluded;
      continue;
    }
    e[i] = relative_error(t[i], r[i]);
    sum += e[i];
    s.max = std::max(s.max, e[i]);
    ++counted;
  }
  s.avg = counted ? sum / static_cast<double>(counted) : 0.0;
  return s;
}

/// sqrt(sum (test - ref)^2 / sum ref^2). Throws std::domain_error when the
/// reference has no energy. Non-finite test entries make the result Inf.
inline double rms_error(const MatrixF32& test, const MatrixF64& ref) {
  if (test.rows() != ref.rows() || test.cols() != ref.cols())
    throw DimensionError("rms_error: shape mismatch");
  auto t = test.values();
  auto r = ref.values();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(t[i])) return kInf;
    const double d = static_cast<double>(t[i]) - r[i];
    num += d * d;
    den += r[i] * r[i];
  }
  if (den == 0.0) throw std::domain_error("rms_error: reference is all zero");
  return std::sqrt(num / den);
}

/// -20 log10(rms); +Inf for an exact match.
inline double snr_db(double rms) {
  if (rms == 0.0) return kInf;
  return -20.0 * std::log10(rms);
}

}  // namespace bf16x9
