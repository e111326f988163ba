#include "physica/attention.hpp"

#include "physica/errors.hpp"
#include "physica/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace physica {

namespace {

// Lexicographic total order over kv rows via the monotone bit key.
bool row_less(const Mat& m, int a, int b) {
  const double* ra = m.row(a);
  const double* rb = m.row(b);
  for (int c = 0; c < m.cols; ++c) {
    const std::uint64_t ka = ordered_key(ra[c]), kb = ordered_key(rb[c]);
    if (ka != kb) return ka < kb;
  }
  return false;
}

}  // namespace

AttentionParams AttentionParams::seeded(int d_model, std::uint64_t seed) {
  AttentionParams p;
  SplitMix64 rng(seed);
  const double a = std::sqrt(6.0 / (d_model + d_model));
  for (Mat* w : {&p.w_q, &p.w_k, &p.w_v}) {
    *w = Mat(d_model, d_model);
    for (auto& v : w->data) v = rng.uniform(-a, a);
  }
  p.scale = 1.0 / std::sqrt(static_cast<double>(d_model));
  return p;
}

Mat cross_attention(const Mat& queries, const Mat& keys_values, const AttentionParams& params) {
  const int n = queries.rows, m = keys_values.rows, d = queries.cols;
  if (m < 1) throw EmptyKeys("cross_attention requires at least one key/value token");
  if (keys_values.cols != d || params.w_q.cols != d || params.w_q.rows != d ||
      params.w_k.rows != d || params.w_k.cols != d || params.w_v.rows != d ||
      params.w_v.cols != d)
    throw DimMismatch("cross_attention width mismatch");

  // Canonical key/value order: all reductions below run over this order, so
  // the result is invariant under input row permutation.
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(),
            [&](int a, int b) { return row_less(keys_values, a, b); });

  Mat k(m, d), v(m, d);
  for (int j = 0; j < m; ++j) {
    const double* src = keys_values.row(perm[j]);
    double* krow = k.row(j);
    double* vrow = v.row(j);
    for (int r = 0; r < d; ++r) {
      const double* wk = params.w_k.row(r);
      const double* wv = params.w_v.row(r);
      double acck = 0.0, accv = 0.0;
      for (int c = 0; c < d; ++c) {
        acck += wk[c] * src[c];
        accv += wv[c] * src[c];
      }
      krow[r] = acck;
      vrow[r] = accv;
    }
  }

  Mat out(n, d);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double* qsrc = queries.row(i);
    Vec q(static_cast<std::size_t>(d));
    for (int r = 0; r < d; ++r) {
      const double* wq = params.w_q.row(r);
      double acc = 0.0;
      for (int c = 0; c < d; ++c) acc += wq[c] * qsrc[c];
      q[static_cast<std::size_t>(r)] = acc;
    }

    Vec scores(static_cast<std::size_t>(m));
    double max_score = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      const double* krow = k.row(j);
      double acc = 0.0;
      for (int c = 0; c < d; ++c) acc += q[static_cast<std::size_t>(c)] * krow[c];
      const double s = acc * params.scale;
      scores[static_cast<std::size_t>(j)] = s;
      max_score = std::max(max_score, s);
    }

    double denom = 0.0;
    for (int j = 0; j < m; ++j) {
      scores[static_cast<std::size_t>(j)] = std::exp(scores[static_cast<std::size_t>(j)] - max_score);
      denom += scores[static_cast<std::size_t>(j)];
    }

    double* orow = out.row(i);
    for (int j = 0; j < m; ++j) {
      const double weight = scores[static_cast<std::size_t>(j)] / denom;
      const double* vrow = v.row(j);
      for (int c = 0; c < d; ++c) orow[c] += weight * vrow[c];
    }
  }
  return out;
}

Mat fuse_vehicle(const Mat& h_map_proj, const Mat& h_box_proj, const Mat& h_coor,
                 const AttentionParams& params) {
  if (h_map_proj.rows != h_box_proj.rows || h_map_proj.cols != h_box_proj.cols)
    throw DimMismatch("h_map_proj / h_box_proj shape mismatch");
  if (h_coor.rows == 0) return h_map_proj;  // no boxes: map tokens pass through

  Mat attended = cross_attention(h_box_proj, h_coor, params);
  Mat out = h_map_proj;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += attended.data[i];
  return out;
}

Mat fuse_condition(const Mat& h_vehicle, const Mat& h_c, const Mat& h_world,
                   const AttentionParams& params) {
  if (h_vehicle.cols != h_c.cols) throw DimMismatch("h_vehicle / h_c width mismatch");
  Mat queries(h_vehicle.rows + h_c.rows, h_vehicle.cols);
  std::copy(h_vehicle.data.begin(), h_vehicle.data.end(), queries.data.begin());
  std::copy(h_c.data.begin(), h_c.data.end(),
            queries.data.begin() + static_cast<std::ptrdiff_t>(h_vehicle.data.size()));
  return cross_attention(queries, h_world, params);
}

TokenGrid inflate_views(const std::vector<TokenGrid>& grids) {
  if (grids.empty()) throw DimMismatch("inflate_views needs at least one grid");
  const TokenGrid& first = grids.front();
  for (const auto& g : grids)
    if (g.t != first.t || g.h != first.h || g.w != first.w || g.c != first.c || g.inflated)
      throw DimMismatch("inflate_views requires per-view grids with equal dims");

  const int v = static_cast<int>(grids.size());
  TokenGrid out(first.t, first.h, first.w * v, first.c, v, true);
  for (int ti = 0; ti < first.t; ++ti)
    for (int y = 0; y < first.h; ++y)
      for (int view = 0; view < v; ++view) {
        const TokenGrid& g = grids[static_cast<std::size_t>(view)];
        const std::size_t src = g.index(ti, y, 0, 0);
        const std::size_t dst = out.index(ti, y, view * first.w, 0);
        std::copy_n(g.data.begin() + static_cast<std::ptrdiff_t>(src),
                    static_cast<std::size_t>(first.w) * first.c,
                    out.data.begin() + static_cast<std::ptrdiff_t>(dst));
      }
  return out;
}

std::vector<TokenGrid> deinflate_views(const TokenGrid& grid) {
  if (!grid.inflated || grid.views < 1 || grid.w % grid.views != 0)
    throw DimMismatch("deinflate_views requires an inflated grid");
  const int v = grid.views;
  const int w = grid.w / v;
  std::vector<TokenGrid> out(static_cast<std::size_t>(v), TokenGrid(grid.t, grid.h, w, grid.c));
  for (int ti = 0; ti < grid.t; ++ti)
    for (int y = 0; y < grid.h; ++y)
      for (int view = 0; view < v; ++view) {
        TokenGrid& g = out[static_cast<std::size_t>(view)];
        const std::size_t src = grid.index(ti, y, view * w, 0);
        const std::size_t dst = g.index(ti, y, 0, 0);
        std::copy_n(grid.data.begin() + static_cast<std::ptrdiff_t>(src),
                    static_cast<std::size_t>(w) * grid.c,
                    g.data.begin() + static_cast<std::ptrdiff_t>(dst));
      }
  return out;
}

}  // namespace physica
