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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Criterion 8 (hardware throughput and application
// results) cannot run on a CPU; its replacement suites run instead.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bf16x9/bf16x9.hpp"

namespace {

using namespace bf16x9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

bool bit_equal(const MatrixF32& x, const MatrixF32& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (fp32_bits(x.values()[i]) != fp32_bits(y.values()[i])) return false;
  return true;
}

GemmRequest request(std::size_t m, std::size_t n, std::size_t k, Mode mode) {
  GemmRequest r{m, n, k};
  r.mode = mode;
  return r;
}

Outcome lossless_roundtrip() {
  const RoundtripSummary s = roundtrip_exhaustive(std::max(1u, std::thread::hardware_concurrency()));
  std::ostringstream os;
  os << s.checked << " patterns (" << s.normal << " normal, " << s.subnormal << " subnormal, " << s.zero
     << " zero, " << s.inf << " inf, " << s.nan << " nan), " << s.failures << " failures";
  if (s.first_failure) os << ", first 0x" << std::hex << *s.first_failure;
  return {s.failures == 0 && s.checked == (1ull << 32), os.str()};
}

Outcome error_bound() {
  std::size_t violations = 0, checked = 0;
  double worst = 0;  // largest err / bound seen
  for (std::size_t k : {16u, 256u, 4096u}) {
    for (std::uint64_t t = 0; t < 1000; ++t) {
      const MatrixF32 x = random_normal_f32(1, k, derive_seed(derive_seed(2, k), 2 * t));
      const MatrixF32 y = random_normal_f32(k, 1, derive_seed(derive_seed(2, k), 2 * t + 1));
      const MatrixF64 xd = convert<double>(x), yd = convert<double>(y);
      const double ref = gemm_fp64(request(1, 1, k, Mode::fp64_oracle), xd, yd)(0, 0);
      const double kappa = dot_condition(xd.values(), yd.values());
      const double bound = static_cast<double>(k) * 0x1p-24 * kappa;
      for (Mode mode : {Mode::native_fp32, Mode::bf16x9}) {
        const MatrixF32 out = sgemm(request(1, 1, k, mode), x, y, {}, DispatchPolicy{}).c;
        const double err = relative_error(out(0, 0), ref);
        ++checked;
        if (!(err <= bound)) ++violations;
        if (std::isfinite(bound) && bound > 0) worst = std::max(worst, err / bound);
      }
    }
  }
  return {violations == 0, std::to_string(checked) + " dot products (k = 16, 256, 4096; native and bf16x9), " +
                               std::to_string(violations) + " above k*2^-24*kappa, worst err/bound " + fmt(worst)};
}

const std::vector<double> kDeltas{1e1, 1e2, 1e3, 1e4, 1e5, 1e6};

Outcome condition_sweep() {
  CondSweepConfig cfg;
  cfg.deltas = kDeltas;
  cfg.n = 160;
  cfg.trials = 100;
  cfg.modes = {Mode::native_fp32, Mode::bf16x9};
  cfg.seed = 3;
  const auto rows = cond_sweep(cfg);
  bool pass = true;
  std::ostringstream os;
  for (std::size_t d = 0; d < kDeltas.size(); ++d) {
    const AccuracyReport& native = rows[2 * d].report;
    const AccuracyReport& emulated = rows[2 * d + 1].report;
    const double frac = emulated.fraction_emulated_better.value_or(0);
    const bool ok = emulated.avg_rel_err <= native.avg_rel_err && frac >= 0.5;
    pass = pass && ok;
    os << (d ? "; " : "") << "delta " << fmt(kDeltas[d]) << ": avg " << fmt(emulated.avg_rel_err) << " vs "
       << fmt(native.avg_rel_err) << ", better " << fmt(frac) << (ok ? "" : " [fail]");
  }
  return {pass, os.str()};
}

Outcome exponent_dominance() {
  ExponentGridSpec spec;
  spec.exp_a = {-140, 124, 8};
  spec.exp_b = {-140, 124, 8};
  spec.m = 128;
  spec.k = 256;
  spec.n = 512;
  spec.seed = 4;
  const auto cells = exponent_sweep(spec, {Mode::native_fp32, Mode::bf16x9});
  std::size_t good[2][2] = {}, total[2][2] = {}, degenerate = 0;
  for (std::size_t i = 0; i + 1 < cells.size(); i += 2) {
    const ExponentCell& native = cells[i];
    const ExponentCell& emulated = cells[i + 1];
    if (native.degenerate) {
      ++degenerate;
      continue;
    }
    const bool sa = exponent_is_subnormal(native.exp_a), sb = exponent_is_subnormal(native.exp_b);
    ++total[sa][sb];
    if (*emulated.snr_db >= *native.snr_db - 1.0) ++good[sa][sb];
  }
  std::size_t all_good = 0, all_total = 0;
  bool quadrants_ok = true;
  std::ostringstream os;
  const char* names[2][2] = {{"normal x normal", "normal x denormal"}, {"denormal x normal", "denormal x denormal"}};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      all_good += good[a][b];
      all_total += total[a][b];
      os << names[a][b] << " " << good[a][b] << "/" << total[a][b];
      if (total[a][b] == 0) {
        os << " (every cell degenerate)";
      } else if (good[a][b] * 10 < total[a][b] * 9) {
        quadrants_ok = false;
        os << " [fail]";
      }
      os << "; ";
    }
  }
  os << "overall " << all_good << "/" << all_total << " non-degenerate cells within 1 dB, " << degenerate
     << " degenerate";
  return {all_total > 0 && all_good * 10 >= all_total * 9 && quadrants_ok, os.str()};
}

Outcome special_values() {
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  const float inf = std::numeric_limits<float>::infinity();
  const float nan = std::numeric_limits<float>::quiet_NaN();
  const Triplet pos = decompose_fp32(inf), neg = decompose_fp32(-inf);
  expect(pos == Triplet{kBf16MaxFinite, kBf16MaxFinite, kBf16MaxFinite}, "decompose(+inf)");
  expect(neg == Triplet{-kBf16MaxFinite, -kBf16MaxFinite, -kBf16MaxFinite}, "decompose(-inf)");
  expect(recompose(pos) == kFp32MaxFiniteValue, "recompose(+inf triplet)");
  expect(recompose(neg) == -kFp32MaxFiniteValue, "recompose(-inf triplet)");

  const std::size_t m = 12, n = 10, k = 24;
  for (Mode mode : {Mode::bf16x9, Mode::bf16x6}) {
    const std::string tag = std::string(to_string(mode)) + ": ";
    MatrixF32 a = random_normal_f32(m, k, 51), b = random_normal_f32(k, n, 52);
    a(3, 7) = nan;
    b(11, 6) = nan;
    const MatrixF32 out = gemm_emulated(request(m, n, k, mode), a, b);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        expect(std::isnan(out(i, j)) == (i == 3 || j == 6), tag + "NaN row/column at (" + std::to_string(i) + "," +
                                                                std::to_string(j) + ")");

    const MatrixF32 x{{inf, 1.0f}}, y{{inf}, {1.0f}};
    const MatrixF32 xn{{inf, -inf}}, yn{{1.0f}, {1.0f}};
    expect(gemm_emulated(request(1, 1, 2, mode), x, y)(0, 0) == inf, tag + "inf*inf + 1 = inf");
    expect(std::isnan(gemm_emulated(request(1, 1, 2, mode), xn, yn)(0, 0)), tag + "inf - inf = nan");
    const MatrixF32 z{{inf, -2.0f}}, w{{-1.0f}, {3.0f}};
    expect(gemm_emulated(request(1, 1, 2, mode), z, w)(0, 0) == -inf, tag + "sign of inf");
  }
  std::string detail = failures.empty() ? "inf triplets, NaN row/column spread, inf arithmetic after patching"
                                        : std::to_string(failures.size()) + " failures, first: " + failures.front();
  return {failures.empty(), detail};
}

Outcome work_ratio() {
  std::size_t checked = 0, bad = 0;
  for (std::size_t m : {1u, 7u, 160u, 4096u, 65536u})
    for (std::size_t n : {1u, 13u, 2048u, 65536u})
      for (std::size_t k : {1u, 16u, 1024u, 65536u}) {
        const FlopCount x9 = flop_count(request(m, n, k, Mode::bf16x9));
        const FlopCount x6 = flop_count(request(m, n, k, Mode::bf16x6));
        checked += 2;
        bad += !(x9.ratio == 9.0 && x9.emulated_products == 9 * x9.native_products);
        bad += !(x6.ratio == 6.0 && x6.emulated_products == 6 * x6.native_products);
      }
  return {bad == 0, std::to_string(checked) + " shapes, ratio 9 (bf16x9) and 6 (bf16x6), " + std::to_string(bad) +
                        " mismatches"};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Outcome x9_vs_x6_worst_case() {
  CondSweepConfig cfg;
  cfg.deltas = {1e6};
  cfg.n = 160;
  cfg.trials = 100;
  cfg.modes = {Mode::bf16x9, Mode::bf16x6};
  cfg.seed = 7;
  const auto rows = cond_sweep(cfg);
  const double x9 = median(rows[0].trial_max_rel_err), x6 = median(rows[1].trial_max_rel_err);
  std::size_t x9_wins = 0, ties = 0;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    x9_wins += rows[0].trial_max_rel_err[t] < rows[1].trial_max_rel_err[t];
    ties += rows[0].trial_max_rel_err[t] == rows[1].trial_max_rel_err[t];
  }
  return {x9 <= x6, "median per-trial max rel err " + fmt(x9) + " (bf16x9) vs " + fmt(x6) + " (bf16x6); bf16x9 lower in " +
                        std::to_string(x9_wins) + " trials, tied in " + std::to_string(ties)};
}

Outcome determinism_and_absorption() {
  std::vector<std::string> failures;
  for (Mode mode : {Mode::bf16x9, Mode::bf16x6, Mode::native_fp32}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const std::size_t m = 33, n = 47, k = 129;
      const MatrixF32 a = random_normal_f32(m, k, derive_seed(seed, 1)), b = random_normal_f32(k, n, derive_seed(seed, 2));
      MatrixF32 c = random_normal_f32(m, n, derive_seed(seed, 3));
      GemmRequest req = request(m, n, k, mode);
      req.alpha = 0.75f;
      req.beta = -1.5f;
      if (!bit_equal(sgemm(req, a, b, c, DispatchPolicy{}).c, sgemm(req, a, b, c, DispatchPolicy{}).c))
        failures.push_back(std::string(to_string(mode)) + " repeat differs");

      // |C| exceeds |A*B| by far more than 2^24.
      for (float& v : c.values()) v = std::copysign(std::ldexp(1.0f + std::abs(v) / 4, 50), v);
      req.alpha = 1.0f;
      req.beta = 1.0f;
      GemmRequest native = req;
      native.mode = Mode::native_fp32;
      if (!bit_equal(sgemm(req, a, b, c, DispatchPolicy{}).c, sgemm(native, a, b, c, DispatchPolicy{}).c))
        failures.push_back(std::string(to_string(mode)) + " beta absorption");
    }
  }
  std::ostringstream x, y;
  CondSweepConfig cfg;
  cfg.deltas = {10, 1e5};
  cfg.n = 32;
  cfg.trials = 4;
  cfg.modes = {Mode::native_fp32, Mode::bf16x9, Mode::bf16x6};
  write_cond_csv(x, cond_sweep(cfg));
  write_cond_csv(y, cond_sweep(cfg));
  if (x.str() != y.str()) failures.push_back("sweep CSV differs between runs");
  return {failures.empty(), failures.empty() ? "repeat runs bit-identical, beta absorption matches native, sweep CSV "
                                               "byte-identical"
                                             : failures.front()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "lossless round trip", lossless_roundtrip},
      {2, "dot-product error bound", error_bound},
      {3, "condition sweep advantage", condition_sweep},
      {4, "exponent grid SNR dominance", exponent_dominance},
      {5, "special values", special_values},
      {6, "work ratio", work_ratio},
      {7, "bf16x9 vs bf16x6 worst case", x9_vs_x6_worst_case},
      {8, "determinism and beta absorption", determinism_and_absorption},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s  [%d] %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
