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

// Binary matrix interchange format, little-endian throughout:
//
//   offset  size  field
//   0       4     magic "GEMM"
//   4       4     dtype code (1 = FP32, 2 = FP64)
//   8       4     rows
//   12      4     cols
//   16      ...   rows * cols elements, row-major
//
// Element bit patterns are stored verbatim, so NaN payloads, signed zeros
// and subnormals survive a round trip.

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "bf16x9/matrix.hpp"

namespace bf16x9 {

class MatrixFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DType : std::uint32_t { fp32 = 1, fp64 = 2 };

template <typename T>
constexpr DType dtype_of() {
  static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);
  return std::is_same_v<T, float> ? DType::fp32 : DType::fp64;
}

namespace detail {

template <typename U>
void put_le(std::ostream& os, U v) {
  std::array<char, sizeof(U)> buf;
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  os.write(buf.data(), buf.size());
}

template <typename U>
U get_le(std::istream& is) {
  std::array<unsigned char, sizeof(U)> buf;
  if (!is.read(reinterpret_cast<char*>(buf.data()), buf.size()))
    throw MatrixFileError("matrix file truncated");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return v;
}

template <typename T>
using bits_t = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;

}  // namespace detail

template <typename T>
void write_matrix(std::ostream& os, const Matrix<T>& m) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() || m.cols() > std::numeric_limits<std::uint32_t>::max())
    throw MatrixFileError("matrix too large for the file format");
  os.write("GEMM", 4);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(dtype_of<T>()));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows()));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols()));
  for (T v : m.values()) detail::put_le(os, std::bit_cast<detail::bits_t<T>>(v));
  if (!os) throw MatrixFileError("write failed");
}

template <typename T>
Matrix<T> read_matrix(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "GEMM", 4) != 0) throw MatrixFileError("bad magic, not a GEMM matrix file");
  const auto dtype = detail::get_le<std::uint32_t>(is);
  if (dtype != static_cast<std::uint32_t>(dtype_of<T>())) throw MatrixFileError("unexpected dtype code " + std::to_string(dtype));
  const auto rows = detail::get_le<std::uint32_t>(is);
  const auto cols = detail::get_le<std::uint32_t>(is);
  Matrix<T> m(rows, cols);
  for (T& v : m.values()) v = std::bit_cast<T>(detail::get_le<detail::bits_t<T>>(is));
  return m;
}

template <typename T>
void save_matrix(const std::string& path, const Matrix<T>& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw MatrixFileError("cannot open " + path + " for writing");
  write_matrix(os, m);
}

template <typename T>
Matrix<T> load_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw MatrixFileError("cannot open " + path);
  return read_matrix<T>(is);
}

}  // namespace bf16x9
