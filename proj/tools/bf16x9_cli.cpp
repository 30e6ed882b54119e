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

// bf16x9_cli: inspect triplet decompositions, verify round trips, run single
// GEMMs against the FP64 oracle and drive the two accuracy sweeps.
//
// Exit status: 0 success, 1 usage or I/O error, 2 numerical check failed.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "bf16x9/bf16x9.hpp"

namespace {

using namespace bf16x9;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheck = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "0x" followed by up to 8 hex digits is an FP32 bit pattern; anything else
// goes through from_chars (which also takes inf and nan).
float parse_float(std::string_view s) {
  std::string_view body = s;
  bool negative = false;
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
    body.remove_prefix(2);
    std::uint32_t bits = 0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), bits, 16);
    if (ec != std::errc() || ptr != body.data() + body.size() || body.size() > 8)
      throw UsageError("bad bit pattern '" + std::string(s) + "'");
    const float x = fp32_from_bits(bits);
    return negative ? -x : x;
  }
  float x = 0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), x);
  if (body.empty() || ec != std::errc() || ptr != body.data() + body.size())
    throw UsageError("cannot parse '" + std::string(s) + "' as a float");
  return negative ? -x : x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& s) {
  double x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw UsageError("cannot parse '" + s + "' as a number");
  return x;
}

std::vector<Mode> parse_modes(const std::string& list) {
  std::vector<Mode> modes;
  for (const auto& name : split(list, ',')) {
    const auto m = parse_mode(name);
    if (!m || *m == Mode::auto_select) throw UsageError("unknown or non-concrete mode '" + name + "'");
    modes.push_back(*m);
  }
  if (modes.empty()) throw UsageError("empty mode list");
  return modes;
}

ExponentRange parse_range(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2 && parts.size() != 3) throw UsageError("exponent range must be lo:hi[:step], got '" + s + "'");
  auto to_int = [&](const std::string& p) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
    if (ec != std::errc() || ptr != p.data() + p.size()) throw UsageError("bad integer '" + p + "' in '" + s + "'");
    return v;
  };
  return {to_int(parts[0]), to_int(parts[1]), parts.size() == 3 ? to_int(parts[2]) : 1};
}

std::string hex(std::uint32_t bits, int width) {
  std::ostringstream os;
  os << "0x" << std::uppercase << std::hex << std::setw(width) << std::setfill('0') << bits;
  return os.str();
}

std::string format_float(float x) {
  if (x != x) return "nan";
  if (x == std::numeric_limits<float>::infinity()) return "inf";
  if (x == -std::numeric_limits<float>::infinity()) return "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

// CSV rendered as space-aligned columns.
std::string render_pretty(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(csv);
  for (std::string line; std::getline(ss, line);) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1)
      cells.push_back(line.substr(start, pos - start));
    cells.push_back(line.substr(start));
    rows.push_back(std::move(cells));
  }
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::ostringstream os;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) line += "  ";
      line += r[i] + std::string(width[i] - r[i].size(), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << '\n';
  }
  return os.str();
}

struct Globals {
  std::uint64_t seed = 0;
  std::string mode;
  std::string out;
  std::string format = "csv";
};

void emit(const Globals& g, const std::string& csv) {
  const std::string text = g.format == "pretty" ? render_pretty(csv) : csv;
  if (g.out.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream os(g.out, std::ios::binary);
  if (!os || !(os << text)) throw std::runtime_error("cannot write " + g.out);
}

int run_decompose(const Globals& g, const std::vector<std::string>& values) {
  std::ostringstream csv;
  csv << "input,bits,class,hi,mid,lo,hi_value,mid_value,lo_value,recomposed,lossless\n";
  bool ok = true;
  for (const auto& text : values) {
    const float x = parse_float(text);
    const std::uint32_t bits = fp32_bits(x);
    const Triplet t = decompose_fp32(x);
    const float back = recompose(t);
    ok = ok && roundtrip_ok(bits);
    csv << text << ',' << hex(bits, 8) << ',' << to_string(classify(x)) << ',' << hex(t.hi.bits, 4) << ','
        << hex(t.mid.bits, 4) << ',' << hex(t.lo.bits, 4) << ',' << format_float(widen(t.hi)) << ','
        << format_float(widen(t.mid)) << ',' << format_float(widen(t.lo)) << ',' << format_float(back) << ','
        << (fp32_bits(back) == bits ? "true" : "false") << '\n';
  }
  emit(g, csv.str());
  return ok ? kExitOk : kExitCheck;
}

int run_roundtrip(const Globals& g, const std::string& coverage, std::uint64_t count, unsigned threads) {
  RoundtripSummary s;
  if (coverage == "exhaustive") {
    s = roundtrip_exhaustive(threads);
  } else if (coverage == "sample") {
    s = roundtrip_sample(count, g.seed);
  } else {
    throw UsageError("coverage must be exhaustive or sample");
  }
  std::ostringstream csv;
  csv << "coverage,checked,failures,zero,subnormal,normal,inf,nan,first_failure\n"
      << coverage << ',' << s.checked << ',' << s.failures << ',' << s.zero << ',' << s.subnormal << ','
      << s.normal << ',' << s.inf << ',' << s.nan << ',' << (s.first_failure ? hex(*s.first_failure, 8) : "")
      << '\n';
  emit(g, csv.str());
  if (s.failures) {
    std::cerr << "roundtrip: " << s.failures << " failures, first at " << hex(*s.first_failure, 8) << '\n';
    return kExitCheck;
  }
  return kExitOk;
}

struct GemmArgs {
  std::size_t m = 160, n = 160, k = 160;
  bool trans_a = false, trans_b = false;
  std::string alpha = "1", beta = "0";
  std::string a_path, b_path, c_path, write_c;
  std::string fill = "normal";
  double max_rel_err = -1;
};

MatrixF32 filled(const std::string& fill, std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (fill == "normal") return random_normal_f32(rows, cols, seed);
  if (fill == "identity") {
    MatrixF32 m(rows, cols, 0.0f);
    for (std::size_t i = 0; i < std::min(rows, cols); ++i) m(i, i) = 1.0f;
    return m;
  }
  throw UsageError("fill must be normal or identity");
}

int run_gemm(const Globals& g, const GemmArgs& args) {
  if (args.m == 0 || args.n == 0 || args.k == 0) throw UsageError("dimensions must be positive");
  GemmRequest req{args.m, args.n, args.k};
  req.trans_a = args.trans_a ? Op::transpose : Op::none;
  req.trans_b = args.trans_b ? Op::transpose : Op::none;
  req.alpha = parse_float(args.alpha);
  req.beta = parse_float(args.beta);
  if (!g.mode.empty()) {
    const auto m = parse_mode(g.mode);
    if (!m) throw UsageError("unknown mode '" + g.mode + "'");
    req.mode = *m;
  } else {
    req.mode = Mode::auto_select;
  }

  const std::size_t a_rows = args.trans_a ? args.k : args.m, a_cols = args.trans_a ? args.m : args.k;
  const std::size_t b_rows = args.trans_b ? args.n : args.k, b_cols = args.trans_b ? args.k : args.n;
  const MatrixF32 a = args.a_path.empty() ? filled(args.fill, a_rows, a_cols, derive_seed(g.seed, 0))
                                          : load_matrix<float>(args.a_path);
  const MatrixF32 b = args.b_path.empty() ? filled(args.fill, b_rows, b_cols, derive_seed(g.seed, 1))
                                          : load_matrix<float>(args.b_path);
  MatrixF32 c;
  if (!args.c_path.empty()) {
    c = load_matrix<float>(args.c_path);
  } else if (req.beta != 0.0f) {
    c = random_normal_f32(args.m, args.n, derive_seed(g.seed, 2));
  }

  const GemmResult result = sgemm(req, a, b, c);
  GemmRequest oracle_req = req;
  oracle_req.mode = Mode::fp64_oracle;
  const MatrixF64 ref = gemm_fp64(oracle_req, convert<double>(a), convert<double>(b), convert<double>(c));
  const ErrorStats err = relative_error_stats(result.c, ref);
  const bool all_zero = std::all_of(ref.values().begin(), ref.values().end(), [](double v) { return v == 0.0; });
  std::string rms_text, snr_text;
  if (!all_zero) {
    const double rms = rms_error(result.c, ref);
    rms_text = format_number(rms);
    snr_text = format_number(snr_db(rms));
  }
  GemmRequest resolved = req;
  resolved.mode = result.resolved;

  std::ostringstream csv;
  csv << "m,n,k,mode,avg_rel_err,max_rel_err,rms,snr_db,flop_ratio,seed\n"
      << args.m << ',' << args.n << ',' << args.k << ',' << to_string(result.resolved) << ','
      << format_number(err.avg) << ',' << format_number(err.max) << ',' << rms_text << ',' << snr_text << ','
      << format_number(flop_count(resolved).ratio) << ',' << g.seed << '\n';
  emit(g, csv.str());
  if (!args.write_c.empty()) save_matrix(args.write_c, result.c);
  if (args.max_rel_err >= 0 && !(err.max <= args.max_rel_err)) {
    std::cerr << "gemm: max relative error " << format_number(err.max) << " exceeds " << args.max_rel_err << '\n';
    return kExitCheck;
  }
  return kExitOk;
}

struct CondArgs {
  std::string deltas = "1e1,1e2,1e3,1e4,1e5,1e6";
  std::size_t n = 160;
  std::size_t trials = 100;
  std::string diag_scale;
};

int run_sweep_cond(const Globals& g, const CondArgs& args) {
  CondSweepConfig cfg;
  for (const auto& d : split(args.deltas, ',')) cfg.deltas.push_back(parse_double(d));
  if (cfg.deltas.empty()) throw UsageError("delta list is empty");
  cfg.n = args.n;
  cfg.trials = args.trials;
  cfg.seed = g.seed;
  cfg.modes = parse_modes(g.mode.empty() ? "native_fp32,bf16x9" : g.mode);
  if (!args.diag_scale.empty()) {
    const auto parts = split(args.diag_scale, ',');
    if (parts.size() != 2) throw UsageError("diag-scale must be lo,hi");
    cfg.diag_scaling = DiagScaling{parse_double(parts[0]), parse_double(parts[1])};
  }
  std::ostringstream csv;
  write_cond_csv(csv, cond_sweep(cfg));
  emit(g, csv.str());
  return kExitOk;
}

struct ExponentArgs {
  std::string exp_a = "-140:124:8", exp_b = "-140:124:8";
  std::size_t m = 512, n = 2048, k = 1024;
};

int run_sweep_exponent(const Globals& g, const ExponentArgs& args) {
  ExponentGridSpec spec;
  spec.exp_a = parse_range(args.exp_a);
  spec.exp_b = parse_range(args.exp_b);
  spec.m = args.m;
  spec.n = args.n;
  spec.k = args.k;
  spec.seed = g.seed;
  std::ostringstream csv;
  write_exponent_csv(csv, exponent_sweep(spec, parse_modes(g.mode.empty() ? "native_fp32,bf16x9" : g.mode)));
  emit(g, csv.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FP32 GEMM emulation with BF16 triplets: inspection and accuracy tools"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--mode", g.mode,
                 "native_fp32, bf16x9, bf16x6, fp64_oracle or auto (gemm); comma-separated list for sweeps");
  app.add_option("--out", g.out, "Write output to this file instead of stdout");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "pretty"}))->capture_default_str();

  std::vector<std::string> values;
  auto* decompose = app.add_subcommand("decompose", "Show the BF16 triplet of FP32 values (decimal or 0x bits)");
  decompose->add_option("values", values, "Values to decompose")->required();

  std::string coverage = "sample";
  std::uint64_t count = 1'000'000;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  auto* roundtrip = app.add_subcommand("roundtrip", "Check recompose(decompose(x)) over FP32 bit patterns");
  roundtrip->add_option("--coverage", coverage)->check(CLI::IsMember({"exhaustive", "sample"}))->capture_default_str();
  roundtrip->add_option("--count", count, "Patterns to draw in sample mode")->capture_default_str();
  roundtrip->add_option("--threads", threads, "Workers in exhaustive mode")->capture_default_str();

  GemmArgs gemm;
  auto* gemm_cmd = app.add_subcommand("gemm", "Run one GEMM and compare with the FP64 oracle");
  gemm_cmd->add_option("-m,--m", gemm.m)->capture_default_str();
  gemm_cmd->add_option("-n,--n", gemm.n)->capture_default_str();
  gemm_cmd->add_option("-k,--k", gemm.k)->capture_default_str();
  gemm_cmd->add_flag("--trans-a", gemm.trans_a, "Use A transposed");
  gemm_cmd->add_flag("--trans-b", gemm.trans_b, "Use B transposed");
  gemm_cmd->add_option("--alpha", gemm.alpha)->capture_default_str();
  gemm_cmd->add_option("--beta", gemm.beta)->capture_default_str();
  gemm_cmd->add_option("--a", gemm.a_path, "A matrix file");
  gemm_cmd->add_option("--b", gemm.b_path, "B matrix file");
  gemm_cmd->add_option("--c", gemm.c_path, "C matrix file");
  gemm_cmd->add_option("--fill", gemm.fill, "Generated inputs: normal or identity")->capture_default_str();
  gemm_cmd->add_option("--write-c", gemm.write_c, "Save the result matrix");
  gemm_cmd->add_option("--max-rel-err", gemm.max_rel_err, "Exit 2 if the max relative error exceeds this");

  CondArgs cond;
  auto* cond_cmd = app.add_subcommand("sweep-cond", "Relative error against target condition number");
  cond_cmd->add_option("--deltas", cond.deltas, "Comma-separated targets")->capture_default_str();
  cond_cmd->add_option("-n,--n", cond.n)->capture_default_str();
  cond_cmd->add_option("--trials", cond.trials)->capture_default_str();
  cond_cmd->add_option("--diag-scale", cond.diag_scale, "lo,hi range for a random diagonal scaling");

  ExponentArgs expo;
  auto* expo_cmd = app.add_subcommand("sweep-exponent", "SNR over a grid of input exponents");
  expo_cmd->add_option("--exp-a", expo.exp_a, "lo:hi[:step]")->capture_default_str();
  expo_cmd->add_option("--exp-b", expo.exp_b, "lo:hi[:step]")->capture_default_str();
  expo_cmd->add_option("-m,--m", expo.m)->capture_default_str();
  expo_cmd->add_option("-n,--n", expo.n)->capture_default_str();
  expo_cmd->add_option("-k,--k", expo.k)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*decompose) return run_decompose(g, values);
    if (*roundtrip) return run_roundtrip(g, coverage, count, threads);
    if (*gemm_cmd) return run_gemm(g, gemm);
    if (*cond_cmd) return run_sweep_cond(g, cond);
    if (*expo_cmd) return run_sweep_exponent(g, expo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
