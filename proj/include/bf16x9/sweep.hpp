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

// Accuracy sweeps against the FP64 oracle:
//  - cond_sweep: average/max componentwise relative error as a function of
//    the target condition number, all modes evaluated on the same matrices;
//  - exponent_sweep: SNR per (exponent of A, exponent of B) grid cell,
//    covering normal and subnormal inputs.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bf16x9/bf16.hpp"
#include "bf16x9/dispatch.hpp"
#include "bf16x9/gemm.hpp"
#include "bf16x9/generator.hpp"
#include "bf16x9/matrix.hpp"
#include "bf16x9/metrics.hpp"
#include "bf16x9/random.hpp"

namespace bf16x9 {

/// Runs `mode` on FP32 inputs (alpha = 1, beta = 0). fp64_oracle returns the
/// FP64 product rounded to FP32.
inline MatrixF32 multiply(Mode mode, const MatrixF32& a, const MatrixF32& b) {
  GemmRequest req;
  req.m = a.rows();
  req.k = a.cols();
  req.n = b.cols();
  req.mode = mode;
  if (mode == Mode::auto_select) throw std::invalid_argument("multiply needs a concrete mode");
  DispatchPolicy explicit_only;
  return sgemm(req, a, b, {}, explicit_only).c;
}

struct AccuracyReport {
  double avg_rel_err = 0;
  double max_rel_err = 0;
  std::optional<double> fraction_emulated_better;  // emulated modes only
  double rms = 0;
  double snr_db = kInf;
  double realized_avg_kappa = 0;
};

struct CondSweepConfig {
  std::vector<double> deltas;
  std::size_t n = 160;
  std::size_t trials = 100;
  std::vector<Mode> modes{Mode::native_fp32, Mode::bf16x9};
  std::uint64_t seed = 0;
  std::optional<DiagScaling> diag_scaling;
};

struct CondSweepRow {
  double delta = 0;
  Mode mode = Mode::native_fp32;
  AccuracyReport report;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> trial_avg_rel_err;
  std::vector<double> trial_max_rel_err;
};

inline bool is_emulated(Mode m) { return m == Mode::bf16x9 || m == Mode::bf16x6; }

/// One row per (delta, mode), deltas outermost. Trial t at delta index d
/// uses seed derive_seed(derive_seed(seed, d), t) for every mode, so modes
/// are compared on identical matrices.
inline std::vector<CondSweepRow> cond_sweep(const CondSweepConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("cond_sweep: trials must be >= 1");
  std::vector<CondSweepRow> rows;
  for (std::size_t d = 0; d < cfg.deltas.size(); ++d) {
    const std::size_t first = rows.size();
    for (Mode mode : cfg.modes) {
      CondSweepRow row;
      row.delta = cfg.deltas[d];
      row.mode = mode;
      row.trials = cfg.trials;
      row.seed = cfg.seed;
      rows.push_back(std::move(row));
    }
    std::vector<std::size_t> better(cfg.modes.size(), 0);
    std::vector<double> rms_sum(cfg.modes.size(), 0.0);
    std::size_t elements = 0;
    double kappa_sum = 0;

    for (std::size_t t = 0; t < cfg.trials; ++t) {
      GeneratorSpec spec;
      spec.n = cfg.n;
      spec.delta = cfg.deltas[d];
      spec.seed = derive_seed(derive_seed(cfg.seed, d), t);
      spec.diag_scaling = cfg.diag_scaling;
      const GeneratedProblem g = gen_cond_targeted(spec);
      kappa_sum += g.realized.average;

      const MatrixF64 ref = gemm_fp64(GemmRequest{cfg.n, cfg.n, cfg.n}, convert<double>(g.a), convert<double>(g.b));
      const MatrixF32 native = multiply(Mode::native_fp32, g.a, g.b);
      const ErrorStats native_err = relative_error_stats(native, ref);
      elements += ref.size() - native_err.excluded;

      for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
        const Mode mode = cfg.modes[mi];
        const MatrixF32 out = mode == Mode::native_fp32 ? native : multiply(mode, g.a, g.b);
        const ErrorStats err = relative_error_stats(out, ref);
        auto& row = rows[first + mi];
        row.trial_avg_rel_err.push_back(err.avg);
        row.trial_max_rel_err.push_back(err.max);
        rms_sum[mi] += rms_error(out, ref);
        if (is_emulated(mode)) {
          auto e = err.per_element.values();
          auto ne = native_err.per_element.values();
          for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] < ne[i]) ++better[mi];
        }
      }
    }

    for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
      auto& row = rows[first + mi];
      auto& r = row.report;
      double sum = 0;
      for (double v : row.trial_avg_rel_err) sum += v;
      r.avg_rel_err = sum / static_cast<double>(cfg.trials);
      r.max_rel_err = *std::max_element(row.trial_max_rel_err.begin(), row.trial_max_rel_err.end());
      if (is_emulated(row.mode))
        r.fraction_emulated_better = elements ? static_cast<double>(better[mi]) / static_cast<double>(elements) : 0.0;
      r.rms = rms_sum[mi] / static_cast<double>(cfg.trials);
      r.snr_db = snr_db(r.rms);
      r.realized_avg_kappa = kappa_sum / static_cast<double>(cfg.trials);
    }
  }
  return rows;
}

struct ExponentRange {
  int lo = 0;
  int hi = 0;
  int step = 8;

  std::vector<int> values() const {
    if (step < 1) throw std::invalid_argument("exponent range: step must be >= 1");
    if (lo > hi) throw std::invalid_argument("exponent range is empty");
    if (lo < -149 || hi > 127) throw std::invalid_argument("exponent range must lie within [-149, 127]");
    std::vector<int> v;
    for (int e = lo; e <= hi; e += step) v.push_back(e);
    return v;
  }
};

struct ExponentGridSpec {
  ExponentRange exp_a{-140, 124, 8};
  ExponentRange exp_b{-140, 124, 8};
  std::size_t m = 512;
  std::size_t n = 2048;
  std::size_t k = 1024;
  std::uint64_t seed = 0;
};

struct ExponentCell {
  int exp_a = 0;
  int exp_b = 0;
  Mode mode = Mode::native_fp32;
  std::optional<double> snr_db;  // empty when degenerate
  bool degenerate = false;
};

/// Exponents below -126 produce FP32 subnormal inputs.
inline bool exponent_is_subnormal(int e) { return e < -126; }

/// Random sign * uniform FP32 significand in [1, 2) * 2^exponent, rounded to
/// the FP32 grid (subnormal for exponent < -126).
inline MatrixF32 random_at_exponent(std::size_t rows, std::size_t cols, int exponent, Rng& rng) {
  MatrixF32 m(rows, cols);
  for (float& v : m.values()) {
    const std::uint32_t bits = rng.next_u32();
    const float significand = fp32_from_bits(0x3F800000u | (bits & 0x7FFFFFu));
    const float x = std::ldexp(significand, exponent);
    v = (bits & 0x80000000u) ? -x : x;
  }
  return m;
}

/// A cell is degenerate when the FP64 reference is not representable as
/// FP32 output: it rounds to all zeros, or some element overflows.
inline bool reference_is_degenerate(const MatrixF64& ref) {
  bool any_nonzero = false;
  for (double v : ref.values()) {
    const float f = static_cast<float>(v);
    if (std::isinf(f)) return true;
    if (f != 0.0f) any_nonzero = true;
  }
  return !any_nonzero;
}

/// Rows ordered exp_a, then exp_b, then mode as given.
inline std::vector<ExponentCell> exponent_sweep(const ExponentGridSpec& spec, const std::vector<Mode>& modes) {
  const auto ea = spec.exp_a.values();
  const auto eb = spec.exp_b.values();
  if (spec.m == 0 || spec.n == 0 || spec.k == 0) throw DimensionError("exponent_sweep: dims must be >= 1");
  std::vector<ExponentCell> cells;
  std::uint64_t cell_index = 0;
  for (int xa : ea) {
    for (int xb : eb) {
      Rng rng(derive_seed(spec.seed, cell_index++));
      const MatrixF32 a = random_at_exponent(spec.m, spec.k, xa, rng);
      const MatrixF32 b = random_at_exponent(spec.k, spec.n, xb, rng);
      const MatrixF64 ref =
          gemm_fp64(GemmRequest{spec.m, spec.n, spec.k}, convert<double>(a), convert<double>(b));
      const bool degenerate = reference_is_degenerate(ref);
      for (Mode mode : modes) {
        ExponentCell cell{xa, xb, mode, std::nullopt, degenerate};
        if (!degenerate) cell.snr_db = snr_db(rms_error(multiply(mode, a, b), ref));
        cells.push_back(cell);
      }
    }
  }
  return cells;
}

// CSV output. Numbers use the shortest round-trip representation, so the
// same results always produce the same bytes.

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline constexpr const char* kCondCsvHeader =
    "delta,mode,avg_rel_err,max_rel_err,fraction_emulated_better,realized_kappa,trials,seed";
inline constexpr const char* kExponentCsvHeader = "exp_a,exp_b,mode,snr_db,degenerate";

inline void write_cond_csv(std::ostream& os, const std::vector<CondSweepRow>& rows) {
  os << kCondCsvHeader << '\n';
  for (const auto& r : rows) {
    os << format_number(r.delta) << ',' << to_string(r.mode) << ',' << format_number(r.report.avg_rel_err) << ','
       << format_number(r.report.max_rel_err) << ','
       << (r.report.fraction_emulated_better ? format_number(*r.report.fraction_emulated_better) : "") << ','
       << format_number(r.report.realized_avg_kappa) << ',' << r.trials << ',' << r.seed << '\n';
  }
}

inline void write_exponent_csv(std::ostream& os, const std::vector<ExponentCell>& cells) {
  os << kExponentCsvHeader << '\n';
  for (const auto& c : cells) {
    os << c.exp_a << ',' << c.exp_b << ',' << to_string(c.mode) << ','
       << (c.snr_db ? format_number(*c.snr_db) : "") << ',' << (c.degenerate ? 1 : 0) << '\n';
  }
}

}  // namespace bf16x9
