#include "physica/tensor_file.hpp"

#include "physica/errors.hpp"
#include "physica/rng.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>

using namespace physica;

TEST_CASE("empty entry table is an 8-byte file that round-trips") {
  TensorFile file;
  const auto bytes = write_tensor_bytes(file);
  REQUIRE(bytes.size() == 8);
  CHECK(std::memcmp(bytes.data(), "PCT1", 4) == 0);
  CHECK(read_tensor_bytes(bytes).entries.empty());
}

TEST_CASE("single f32 2x3 entry has a 24-byte payload at the declared offset") {
  TensorFile file;
  file.add(TensorEntry::f32("a", {2, 3}, {1, 2, 3, 4, 5, 6}));
  const auto bytes = write_tensor_bytes(file);

  // header: magic(4) count(4) name_len(4) name(1) dtype(1) rank(1) dims(8) offset(8)
  const std::size_t header = 8 + 4 + 1 + 1 + 1 + 8 + 8;
  REQUIRE(bytes.size() == header + 24);

  std::uint64_t offset = 0;
  std::memcpy(&offset, bytes.data() + header - 8, 8);
  CHECK(offset == header);

  const TensorFile back = read_tensor_bytes(bytes);
  REQUIRE(back.entries.size() == 1);
  CHECK(back.entries[0].name == "a");
  CHECK(back.entries[0].dims == std::vector<std::uint32_t>{2, 3});
  CHECK(back.entries[0].as_f32() == std::vector<float>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("fuzzed entry sets round-trip bit-identically") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    TensorFile file;
    const int entries = static_cast<int>(rng.next_below(6));
    for (int e = 0; e < entries; ++e) {
      std::vector<std::uint32_t> dims;
      const int rank = static_cast<int>(rng.next_below(4));  // rank 0 = scalar
      std::size_t count = 1;
      for (int r = 0; r < rank; ++r) {
        dims.push_back(static_cast<std::uint32_t>(1 + rng.next_below(5)));
        count *= dims.back();
      }
      const std::string name = "entry_" + std::to_string(e) + "_" + std::to_string(rng.next_below(1000));
      switch (rng.next_below(3)) {
        case 0: {
          std::vector<float> v(count);
          for (auto& x : v) x = static_cast<float>(rng.uniform(-10, 10));
          file.add(TensorEntry::f32(name, dims, v));
          break;
        }
        case 1: {
          std::vector<double> v(count);
          for (auto& x : v) x = rng.uniform(-10, 10);
          file.add(TensorEntry::f64(name, dims, v));
          break;
        }
        default: {
          std::vector<std::uint8_t> v(count);
          for (auto& x : v) x = static_cast<std::uint8_t>(rng.next_below(256));
          file.add(TensorEntry::u8(name, dims, std::move(v)));
          break;
        }
      }
    }
    const auto bytes = write_tensor_bytes(file);
    const TensorFile back = read_tensor_bytes(bytes);
    REQUIRE(back.entries.size() == file.entries.size());
    for (std::size_t i = 0; i < back.entries.size(); ++i) {
      CHECK(back.entries[i].name == file.entries[i].name);
      CHECK(back.entries[i].dtype == file.entries[i].dtype);
      CHECK(back.entries[i].dims == file.entries[i].dims);
      CHECK(back.entries[i].payload == file.entries[i].payload);
    }
    CHECK(write_tensor_bytes(back) == bytes);
  }
}

TEST_CASE("reader rejects corrupt containers with byte offsets") {
  TensorFile file;
  file.add(TensorEntry::f32("a", {4}, {1, 2, 3, 4}));
  file.add(TensorEntry::f32("b", {4}, {5, 6, 7, 8}));
  auto bytes = write_tensor_bytes(file);

  SUBCASE("bad magic") {
    bytes[0] = 'X';
    CHECK_THROWS_AS(read_tensor_bytes(bytes), FormatError);
  }
  SUBCASE("truncated header") {
    std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + 6);
    CHECK_THROWS_AS(read_tensor_bytes(cut), FormatError);
  }
  SUBCASE("payload out of range") {
    bytes.resize(bytes.size() - 4);
    CHECK_THROWS_AS(read_tensor_bytes(bytes), FormatError);
  }
  SUBCASE("overlapping payloads") {
    // Patch entry b's offset to alias entry a's payload.
    // Header: 8, entry a: 4+1+1+1+4+8 = 19 bytes, entry b likewise.
    const std::size_t b_offset_pos = 8 + 19 + 19 - 8;
    const std::size_t a_offset_pos = 8 + 19 - 8;
    std::uint64_t a_offset = 0;
    std::memcpy(&a_offset, bytes.data() + a_offset_pos, 8);
    std::memcpy(bytes.data() + b_offset_pos, &a_offset, 8);
    try {
      read_tensor_bytes(bytes);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("overlap") != std::string::npos);
    }
  }
  SUBCASE("unknown dtype code") {
    // dtype byte of entry a sits right after magic+count+name_len+name.
    bytes[8 + 4 + 1] = 9;
    CHECK_THROWS_AS(read_tensor_bytes(bytes), FormatError);
  }
  SUBCASE("duplicate names") {
    TensorFile dup;
    dup.add(TensorEntry::f32("same", {1}, {1.0f}));
    dup.add(TensorEntry::f32("same", {1}, {2.0f}));
    CHECK_THROWS_AS(read_tensor_bytes(write_tensor_bytes(dup)), FormatError);
  }
}

TEST_CASE("file round trip through disk") {
  TensorFile file;
  file.add(TensorEntry::f64("weights/w0", {2, 2}, {1.5, -2.5, 3.5, -4.5}));
  const std::string path = (std::filesystem::temp_directory_path() / "physica_tf_test.pct").string();
  write_tensor_file(path, file);
  const TensorFile back = read_tensor_file(path);
  REQUIRE(back.find("weights/w0") != nullptr);
  CHECK(back.find("weights/w0")->as_f64() == std::vector<double>{1.5, -2.5, 3.5, -4.5});
  std::filesystem::remove(path);
}
