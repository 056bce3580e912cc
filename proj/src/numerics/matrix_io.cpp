// SPDX-License-Identifier: Apache-2.0
#include "segalign/numerics/matrix_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "segalign/numerics/errors.hpp"

namespace segalign {

static_assert(std::endian::native == std::endian::little,
              "matrix dumps assume a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic{'S', 'G', 'A', '1'};
constexpr std::uint32_t kDtypeF64 = 1;

void put_u32(char* dst, std::uint32_t v) { std::memcpy(dst, &v, 4); }
std::uint32_t get_u32(const char* src) {
  std::uint32_t v;
  std::memcpy(&v, src, 4);
  return v;
}

}  // namespace

std::size_t dump_size(const Matrix& m) noexcept {
  return kMatrixHeaderBytes + m.size() * sizeof(double);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() ||
      m.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidInput("write_matrix: dimensions exceed u32");
  }
  std::array<char, kMatrixHeaderBytes> header{};
  std::memcpy(header.data(), kMagic.data(), 4);
  put_u32(header.data() + 4, static_cast<std::uint32_t>(m.rows()));
  put_u32(header.data() + 8, static_cast<std::uint32_t>(m.cols()));
  put_u32(header.data() + 12, kDtypeF64);
  out.write(header.data(), header.size());
  out.write(reinterpret_cast<const char*>(m.values().data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write_matrix: stream failure");
}

Matrix read_matrix(std::istream& in) {
  std::array<char, kMatrixHeaderBytes> header{};
  if (!in.read(header.data(), header.size())) {
    throw InvalidInput("read_matrix: truncated header");
  }
  if (std::memcmp(header.data(), kMagic.data(), 4) != 0) {
    throw InvalidInput("read_matrix: bad magic");
  }
  const std::uint32_t rows = get_u32(header.data() + 4);
  const std::uint32_t cols = get_u32(header.data() + 8);
  const std::uint32_t dtype = get_u32(header.data() + 12);
  if (dtype != kDtypeF64) {
    throw InvalidInput("read_matrix: unsupported dtype " + std::to_string(dtype));
  }
  std::vector<double> data(static_cast<std::size_t>(rows) * cols);
  if (!in.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(data.size() * sizeof(double)))) {
    throw InvalidInput("read_matrix: truncated payload");
  }
  Matrix m(rows, cols, std::move(data));
  if (!m.all_finite()) throw InvalidInput("read_matrix: non-finite entry");
  return m;
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_matrix(out, m);
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_matrix(in);
}

}  // namespace segalign
