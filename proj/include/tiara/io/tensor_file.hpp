#pragma once
// Binary tensor container: "TIAR", u32 version, u32 rank, rank x u64 dims,
// then row-major binary64 payload. All fields little-endian.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tiara/matrix.hpp"

namespace tiara::io {

inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr std::size_t kMaxRank = 4;

struct Tensor {
  std::vector<std::uint64_t> dims;
  std::vector<double> values;

  std::size_t rank() const noexcept { return dims.size(); }
  /// Throws DomainError if rank is outside 1..4 or values.size() != product(dims).
  void validate() const;
  std::string shape_string() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

Tensor tensor_from_matrix(const Matrix& m);
/// Rank-2 tensor to matrix; DomainError otherwise.
Matrix matrix_from_tensor(const Tensor& t);

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
/// Throws IoError carrying the byte offset where decoding failed.
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const Tensor& t);

}  // namespace tiara::io
