#include "tiara/io/tensor_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "tiara/errors.hpp"

namespace tiara::io {
namespace {

constexpr char kMagic[4] = {'T', 'I', 'A', 'R'};
constexpr std::size_t kHeaderFixed = 12;  // magic + version + rank

template <typename T>
T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  v = byteswap_if_big(v);
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(std::span<const std::uint8_t> bytes, std::size_t offset, const char* field) {
  if (bytes.size() < offset + sizeof(T))
    throw IoError(std::string("truncated tensor file: missing ") + field + " at byte " +
                      std::to_string(offset),
                  offset);
  T v;
  std::memcpy(&v, bytes.data() + offset, sizeof(T));
  return byteswap_if_big(v);
}

}  // namespace

void Tensor::validate() const {
  if (dims.empty() || dims.size() > kMaxRank)
    throw DomainError("tensor rank " + std::to_string(dims.size()) + " outside 1..4");
  std::uint64_t count = 1;
  for (auto d : dims) {
    if (d != 0 && count > std::numeric_limits<std::uint64_t>::max() / d)
      throw DomainError("tensor dims overflow");
    count *= d;
  }
  if (count != values.size())
    throw DomainError("tensor " + shape_string() + " expects " + std::to_string(count) +
                      " values, holds " + std::to_string(values.size()));
}

std::string Tensor::shape_string() const {
  std::ostringstream s;
  s << '(';
  for (std::size_t i = 0; i < dims.size(); ++i) s << (i ? "," : "") << dims[i];
  s << ')';
  return s.str();
}

Tensor tensor_from_matrix(const Matrix& m) {
  const auto d = m.data();
  return {{m.rows(), m.cols()}, std::vector<double>(d.begin(), d.end())};
}

Matrix matrix_from_tensor(const Tensor& t) {
  t.validate();
  if (t.rank() != 2) throw DomainError("expected a rank-2 tensor, got " + t.shape_string());
  return Matrix(t.dims[0], t.dims[1], t.values);
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  t.validate();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderFixed + 8 * t.dims.size() + 8 * t.values.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put(out, kTensorVersion);
  put(out, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) put(out, d);
  for (double v : t.values) put(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw IoError("bad magic: expected \"TIAR\" at byte 0", 0);
  const auto version = get<std::uint32_t>(bytes, 4, "version");
  if (version != kTensorVersion)
    throw IoError("unsupported tensor version " + std::to_string(version) + " at byte 4", 4);
  const auto rank = get<std::uint32_t>(bytes, 8, "rank");
  if (rank == 0 || rank > kMaxRank)
    throw IoError("tensor rank " + std::to_string(rank) + " outside 1..4 at byte 8", 8);

  Tensor t;
  std::size_t offset = kHeaderFixed;
  std::uint64_t count = 1;
  for (std::uint32_t r = 0; r < rank; ++r, offset += 8) {
    const auto d = get<std::uint64_t>(bytes, offset, "dimension");
    if (d != 0 && count > std::numeric_limits<std::uint64_t>::max() / 8 / d)
      throw IoError("tensor dims overflow at byte " + std::to_string(offset), offset);
    count *= d;
    t.dims.push_back(d);
  }
  const std::uint64_t payload = bytes.size() - offset;
  if (payload != count * 8) {
    const std::uint64_t at = payload < count * 8 ? bytes.size() : offset + count * 8;
    throw IoError("payload holds " + std::to_string(payload) + " bytes, dims " + t.shape_string() +
                      " need " + std::to_string(count * 8) + " (mismatch at byte " +
                      std::to_string(at) + ")",
                  at);
  }
  t.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i, offset += 8)
    t.values[i] = std::bit_cast<double>(get<std::uint64_t>(bytes, offset, "value"));
  return t;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed on '" + path.string() + "'", bytes.size());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("write failed on '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Tensor read_tensor(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_tensor(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what(), e.offset());
  }
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  write_file_atomic(path, encode_tensor(t));
}

}  // namespace tiara::io
