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

// Test-matrix generation with a prescribed average dot-product condition
// number delta. Built backwards from the product: C gets entries of
// magnitude ~1/delta plus one ~1 entry per column, A is a random
// orthonormal matrix and B = A^-1 C, so every C(i, j) = A(i,:) . B(:,j) has
// ||A(i,:)|| ~ 1, ||B(:,j)|| = ||C(:,j)|| ~ 1 and |C(i, j)| ~ 1/delta.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <stdexcept>
#include <vector>

#include "bf16x9/matrix.hpp"
#include "bf16x9/metrics.hpp"
#include "bf16x9/random.hpp"

namespace bf16x9 {

/// Haar-distributed orthonormal n x n matrix: Householder QR of a Gaussian
/// matrix in FP64, with columns sign-fixed so diag(R) > 0.
inline MatrixF64 random_orthonormal(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DimensionError("random_orthonormal: n must be >= 1");
  Rng rng(seed);
  MatrixF64 r(n, n);
  for (double& v : r.values()) v = rng.normal();

  std::vector<std::vector<double>> reflectors;
  std::vector<double> diag_sign(n, 1.0);
  reflectors.reserve(n);
  // The trailing 1x1 block needs no reflector; the sign fix covers it.
  for (std::size_t j = 0; j + 1 < n; ++j) {
    double norm2 = 0;
    for (std::size_t i = j; i < n; ++i) norm2 += r(i, j) * r(i, j);
    const double norm = std::sqrt(norm2);
    const double alpha = r(j, j) >= 0 ? -norm : norm;
    std::vector<double> v(n - j);
    for (std::size_t i = j; i < n; ++i) v[i - j] = r(i, j);
    v[0] -= alpha;
    double vnorm2 = 0;
    for (double x : v) vnorm2 += x * x;
    if (vnorm2 > 0) {
      const double inv = 1.0 / std::sqrt(vnorm2);
      for (double& x : v) x *= inv;
      for (std::size_t c = j; c < n; ++c) {
        double dot = 0;
        for (std::size_t i = j; i < n; ++i) dot += v[i - j] * r(i, c);
        for (std::size_t i = j; i < n; ++i) r(i, c) -= 2.0 * dot * v[i - j];
      }
    }
    diag_sign[j] = r(j, j) < 0 ? -1.0 : 1.0;
    reflectors.push_back(std::move(v));
  }
  diag_sign[n - 1] = r(n - 1, n - 1) < 0 ? -1.0 : 1.0;

  // Q = H_0 H_1 ... H_{n-1}, applied right-to-left to the identity.
  MatrixF64 q = MatrixF64::identity(n);
  for (std::size_t jj = reflectors.size(); jj-- > 0;) {
    const auto& v = reflectors[jj];
    for (std::size_t c = 0; c < n; ++c) {
      double dot = 0;
      for (std::size_t i = jj; i < n; ++i) dot += v[i - jj] * q(i, c);
      for (std::size_t i = jj; i < n; ++i) q(i, c) -= 2.0 * dot * v[i - jj];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n; ++c) q(i, c) *= diag_sign[c];
  return q;
}

struct DiagScaling {
  double lo = 1.0;
  double hi = 1.0;
};

struct GeneratorSpec {
  std::size_t n = 160;
  double delta = 1.0;
  std::uint64_t seed = 0;
  std::optional<DiagScaling> diag_scaling;  // log-uniform column scales for A
};

struct GeneratedProblem {
  MatrixF32 a;
  MatrixF32 b;
  MatrixF64 c_exact;
  MatrixF64 a_exact;  // before rounding to FP32
  MatrixF64 b_exact;
  ConditionField realized;  // of the FP32 inputs, evaluated in FP64
};

inline GeneratedProblem gen_cond_targeted(const GeneratorSpec& spec) {
  if (!(spec.delta >= 1.0)) throw std::invalid_argument("generator: delta must be >= 1");
  if (spec.n < 2) throw std::invalid_argument("generator: n must be >= 2");
  if (spec.diag_scaling && !(spec.diag_scaling->lo > 0 && spec.diag_scaling->hi >= spec.diag_scaling->lo))
    throw std::invalid_argument("generator: diagonal scale range must be positive and ordered");
  const std::size_t n = spec.n;
  Rng rng(derive_seed(spec.seed, 0));

  GeneratedProblem g;
  g.c_exact = MatrixF64(n, n);
  const double small = 1.0 / spec.delta;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i)
      g.c_exact(i, j) = rng.random_sign() * rng.uniform(0.9 * small, 1.1 * small);
    const std::size_t big = rng.index(n);
    g.c_exact(big, j) = rng.random_sign() * rng.uniform(0.99, 1.01);
  }

  const MatrixF64 q = random_orthonormal(n, derive_seed(spec.seed, 1));
  std::vector<double> scale(n, 1.0);
  if (spec.diag_scaling) {
    const double llo = std::log(spec.diag_scaling->lo);
    const double lhi = std::log(spec.diag_scaling->hi);
    for (double& s : scale) s = std::exp(rng.uniform(llo, lhi));
  }

  // A = Q D, B = D^-1 Q^T C.
  g.a_exact = MatrixF64(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n; ++c) g.a_exact(i, c) = q(i, c) * scale[c];
  g.b_exact = MatrixF64(n, n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    auto brow = g.b_exact.row(r);
    for (std::size_t p = 0; p < n; ++p) {
      const double qpr = q(p, r);
      auto crow = g.c_exact.row(p);
      for (std::size_t j = 0; j < n; ++j) brow[j] = std::fma(qpr, crow[j], brow[j]);
    }
    for (double& v : brow) v /= scale[r];
  }

  g.a = convert<float>(g.a_exact);
  g.b = convert<float>(g.b_exact);
  g.realized = condition_field(convert<double>(g.a), convert<double>(g.b));
  return g;
}

}  // namespace bf16x9
