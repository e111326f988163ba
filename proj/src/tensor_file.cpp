#include "physica/tensor_file.hpp"

#include "physica/errors.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace physica {

namespace {

constexpr char kMagic[4] = {'P', 'C', 'T', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Reader {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

  void need(std::size_t n, const char* what) {
    if (pos + n > bytes.size())
      throw FormatError(std::string("truncated ") + what, pos);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes[pos++];
  }
};

}  // namespace

TensorEntry TensorEntry::f32(std::string name, std::vector<std::uint32_t> dims,
                             const std::vector<float>& values) {
  TensorEntry e{std::move(name), Dtype::kF32, std::move(dims), {}};
  e.payload.resize(values.size() * 4);
  std::memcpy(e.payload.data(), values.data(), e.payload.size());
  return e;
}

TensorEntry TensorEntry::f64(std::string name, std::vector<std::uint32_t> dims,
                             const std::vector<double>& values) {
  TensorEntry e{std::move(name), Dtype::kF64, std::move(dims), {}};
  e.payload.resize(values.size() * 8);
  std::memcpy(e.payload.data(), values.data(), e.payload.size());
  return e;
}

TensorEntry TensorEntry::u8(std::string name, std::vector<std::uint32_t> dims,
                            std::vector<std::uint8_t> values) {
  return TensorEntry{std::move(name), Dtype::kU8, std::move(dims), std::move(values)};
}

std::vector<float> TensorEntry::as_f32() const {
  std::vector<float> out(payload.size() / 4);
  std::memcpy(out.data(), payload.data(), payload.size());
  return out;
}

std::vector<double> TensorEntry::as_f64() const {
  std::vector<double> out(payload.size() / 8);
  std::memcpy(out.data(), payload.data(), payload.size());
  return out;
}

const TensorEntry* TensorFile::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

void TensorFile::add(TensorEntry entry) { entries.push_back(std::move(entry)); }

std::vector<std::uint8_t> write_tensor_bytes(const TensorFile& file) {
  // Header size is known up front, so payload offsets can be absolute.
  std::size_t header = 8;
  for (const auto& e : file.entries) header += 4 + e.name.size() + 1 + 1 + 4 * e.dims.size() + 8;

  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, static_cast<std::uint32_t>(file.entries.size()));

  std::uint64_t offset = header;
  for (const auto& e : file.entries) {
    if (e.payload.size() != e.element_count() * dtype_size(e.dtype))
      throw FormatError("payload size does not match dims for \"" + e.name + "\"", 0);
    put_u32(out, static_cast<std::uint32_t>(e.name.size()));
    out.insert(out.end(), e.name.begin(), e.name.end());
    out.push_back(static_cast<std::uint8_t>(e.dtype));
    out.push_back(static_cast<std::uint8_t>(e.dims.size()));
    for (auto d : e.dims) put_u32(out, d);
    put_u64(out, offset);
    offset += e.payload.size();
  }
  for (const auto& e : file.entries) out.insert(out.end(), e.payload.begin(), e.payload.end());
  return out;
}

TensorFile read_tensor_bytes(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad magic", 0);
  r.pos = 4;
  const std::uint32_t count = r.u32("entry count");

  struct Pending {
    TensorEntry entry;
    std::uint64_t offset;
    std::uint64_t size;
  };
  std::vector<Pending> pending;
  pending.reserve(count);

  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t entry_pos = r.pos;
    const std::uint32_t name_len = r.u32("name length");
    r.need(name_len, "name");
    TensorEntry e;
    e.name.assign(reinterpret_cast<const char*>(bytes.data() + r.pos), name_len);
    r.pos += name_len;
    const std::uint8_t dtype = r.u8("dtype");
    if (dtype > 2) throw FormatError("unknown dtype code", entry_pos);
    e.dtype = static_cast<Dtype>(dtype);
    const std::uint8_t rank = r.u8("rank");
    for (int d = 0; d < rank; ++d) e.dims.push_back(r.u32("dims"));
    const std::uint64_t offset = r.u64("offset");
    const std::uint64_t size = e.element_count() * dtype_size(e.dtype);
    if (offset > bytes.size() || offset + size > bytes.size())
      throw FormatError("payload out of range for \"" + e.name + "\"", entry_pos);
    pending.push_back({std::move(e), offset, size});
  }

  const std::uint64_t header_end = r.pos;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
  for (const auto& p : pending) {
    if (p.offset < header_end)
      throw FormatError("payload overlaps header for \"" + p.entry.name + "\"", p.offset);
    if (p.size > 0) ranges.emplace_back(p.offset, p.offset + p.size);
  }
  std::sort(ranges.begin(), ranges.end());
  for (std::size_t i = 1; i < ranges.size(); ++i)
    if (ranges[i].first < ranges[i - 1].second)
      throw FormatError("overlapping payloads", ranges[i].first);

  TensorFile file;
  std::vector<std::string> seen;
  for (auto& p : pending) {
    if (std::find(seen.begin(), seen.end(), p.entry.name) != seen.end())
      throw FormatError("duplicate entry name \"" + p.entry.name + "\"", 0);
    seen.push_back(p.entry.name);
    p.entry.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(p.offset),
                           bytes.begin() + static_cast<std::ptrdiff_t>(p.offset + p.size));
    file.entries.push_back(std::move(p.entry));
  }
  return file;
}

void write_tensor_file(const std::string& path, const TensorFile& file) {
  const auto bytes = write_tensor_bytes(file);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed: " + path);
}

TensorFile read_tensor_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return read_tensor_bytes(bytes);
}

}  // namespace physica
