// SPDX-License-Identifier: Apache-2.0
#pragma once

// Binary matrix dump shared by checkpoints, gradient snapshots and
// activation captures:
//
//   offset  size  field
//   0       4     magic "SGA1"
//   4       4     u32 rows
//   8       4     u32 cols
//   12      4     u32 dtype (1 = f64)
//   16      8     reserved, zero
//   24      8*n   row-major payload, little-endian f64
//
// Dumps are self-delimiting, so several may be concatenated in one file.

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "segalign/numerics/matrix.hpp"

namespace segalign {

inline constexpr std::size_t kMatrixHeaderBytes = 24;

std::size_t dump_size(const Matrix& m) noexcept;
void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

}  // namespace segalign
