#pragma once

#include "physica/mat.hpp"

#include <cstdint>
#include <vector>

namespace physica {

/// Single-head scaled dot-product attention, no output projection, no
/// normalization layers. scale = 1/sqrt(d_model).
struct AttentionParams {
  Mat w_q, w_k, w_v;
  double scale = 0.0;

  static AttentionParams seeded(int d_model, std::uint64_t seed);
};

/// softmax(Q Kᵀ · scale) V with Q = W_Q q_i, K = W_K kv_j, V = W_V kv_j per
/// token row. Key/value rows are brought into a canonical sorted order
/// before any accumulation, so permuting them changes nothing, bit for bit.
/// Throws EmptyKeys when keys_values has no rows, DimMismatch on width
/// disagreements.
Mat cross_attention(const Mat& queries, const Mat& keys_values, const AttentionParams& params);

/// h_map_proj + CrossAttn(h_box_proj, h_coor); empty h_coor returns
/// h_map_proj unchanged.
Mat fuse_vehicle(const Mat& h_map_proj, const Mat& h_box_proj, const Mat& h_coor,
                 const AttentionParams& params);

/// CrossAttn(cat(h_vehicle, h_c), h_world); output has n + V rows.
Mat fuse_condition(const Mat& h_vehicle, const Mat& h_c, const Mat& h_world,
                   const AttentionParams& params);

/// Token grid over (frame, row, col, channel); inflated grids concatenate
/// the per-view widths so spatial attention spans all views jointly.
struct TokenGrid {
  int t = 0, h = 0, w = 0, c = 0;
  int views = 1;
  bool inflated = false;
  std::vector<double> data;

  TokenGrid() = default;
  TokenGrid(int t, int h, int w, int c, int views = 1, bool inflated = false)
      : t(t), h(h), w(w), c(c), views(views), inflated(inflated),
        data(static_cast<std::size_t>(t) * h * w * c, 0.0) {}

  std::size_t index(int ti, int y, int x, int ch) const {
    return ((static_cast<std::size_t>(ti) * h + y) * w + x) * c + ch;
  }
  double& at(int ti, int y, int x, int ch) { return data[index(ti, y, x, ch)]; }
  double at(int ti, int y, int x, int ch) const { return data[index(ti, y, x, ch)]; }

  bool operator==(const TokenGrid&) const = default;
};

/// Concatenate along width in input (camera) order. All grids must share
/// dims; throws DimMismatch otherwise.
TokenGrid inflate_views(const std::vector<TokenGrid>& grids);

/// Exact inverse of inflate_views.
std::vector<TokenGrid> deinflate_views(const TokenGrid& grid);

}  // namespace physica
