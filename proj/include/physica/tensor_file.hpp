#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace physica {

enum class Dtype : std::uint8_t { kF32 = 0, kF64 = 1, kU8 = 2 };

inline std::size_t dtype_size(Dtype d) {
  switch (d) {
    case Dtype::kF32: return 4;
    case Dtype::kF64: return 8;
    case Dtype::kU8: return 1;
  }
  return 0;
}

struct TensorEntry {
  std::string name;
  Dtype dtype = Dtype::kF32;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> payload;  // row-major little-endian

  std::size_t element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }

  static TensorEntry f32(std::string name, std::vector<std::uint32_t> dims,
                         const std::vector<float>& values);
  static TensorEntry f64(std::string name, std::vector<std::uint32_t> dims,
                         const std::vector<double>& values);
  static TensorEntry u8(std::string name, std::vector<std::uint32_t> dims,
                        std::vector<std::uint8_t> values);

  std::vector<float> as_f32() const;
  std::vector<double> as_f64() const;
};

/// Minimal named-array container. Layout: magic "PCT1", u32 entry count, then
/// per entry u32 name length, name bytes, u8 dtype, u8 rank, rank u32 dims,
/// u64 absolute payload offset; payloads follow. All integers little-endian.
struct TensorFile {
  std::vector<TensorEntry> entries;

  const TensorEntry* find(const std::string& name) const;
  void add(TensorEntry entry);
};

std::vector<std::uint8_t> write_tensor_bytes(const TensorFile& file);

/// Throws FormatError (with byte offset) on bad magic, truncation, unknown
/// dtype, overlapping payloads, or size mismatches.
TensorFile read_tensor_bytes(const std::vector<std::uint8_t>& bytes);

void write_tensor_file(const std::string& path, const TensorFile& file);
TensorFile read_tensor_file(const std::string& path);

}  // namespace physica
