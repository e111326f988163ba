#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace physica {

using Vec = std::vector<double>;

/// Dense row-major double matrix. Deliberately minimal: the embedding and
/// attention forwards spell out their own loops so the summation order is
/// part of the contract.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }

  bool operator==(const Mat& other) const = default;
};

/// w (m×n) times x (n) -> m. Accumulates left to right over columns.
inline Vec matvec(const Mat& w, const Vec& x) {
  assert(static_cast<std::size_t>(w.cols) == x.size());
  Vec out(static_cast<std::size_t>(w.rows), 0.0);
  for (int r = 0; r < w.rows; ++r) {
    const double* wr = w.row(r);
    double acc = 0.0;
    for (int c = 0; c < w.cols; ++c) acc += wr[c] * x[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = acc;
  }
  return out;
}

/// Monotone bit key: k(a) < k(b) iff a < b as reals, with -0.0 < +0.0.
/// Used to give key/value rows a canonical order that is a total order even
/// where operator< on doubles is not.
inline std::uint64_t ordered_key(double x) {
  const std::uint64_t u = std::bit_cast<std::uint64_t>(x);
  return (u & 0x8000000000000000ull) ? ~u : (u | 0x8000000000000000ull);
}

}  // namespace physica
